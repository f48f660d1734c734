fn main() {
    std::process::exit(shapecalc::cli::main_with(std::env::args_os()));
}
