//! Acceptance criteria. Prints one PASS/FAIL line per criterion and fails if
//! any criterion fails.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use shapecalc::catalog::{FieldDesc, FunctionalDesc, ShapeDesc};
use shapecalc::derivative::{compare, eulerian_fd, FdConfig, Tolerances};
use shapecalc::fields::AmbientField;
use shapecalc::flow::{flow_point, FlowConfig};
use shapecalc::functionals::ShapeFunctional;
use shapecalc::geometry::{Manifold, Region, Vec3};
use shapecalc::validation::{
    crack_suite, locality_suite, normal_dependence_suite, random_test_fields, tangential_nullity_suite, LocalityPair,
    NullityField, Relation, StructureSuiteResult, SuiteConfig,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn shape(json: &str) -> Manifold {
    serde_json::from_str::<ShapeDesc>(json).unwrap().build().unwrap()
}

fn hold_all() -> Region {
    serde_json::from_str(r#"{"kind": "ball", "center": [0, 0, 0], "radius": 5}"#).unwrap()
}

fn field(m: &Manifold, label: &str, json: &str) -> AmbientField {
    serde_json::from_str::<FieldDesc>(json)
        .unwrap()
        .build(m.ambient_dim(), &hold_all())
        .unwrap()
        .with_label(label)
}

fn functional(m: &Manifold, json: &str) -> ShapeFunctional {
    serde_json::from_str::<FunctionalDesc>(json).unwrap().build(m).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn suite_outcome(results: &[StructureSuiteResult]) -> Outcome {
    let failed: Vec<String> = results
        .iter()
        .flat_map(|r| {
            r.cases
                .iter()
                .filter(|c| !c.pass)
                .map(|c| format!("{}: {}", r.functional, c.description))
        })
        .collect();
    let n: usize = results.iter().map(|r| r.cases.len()).sum();
    let worst = results
        .iter()
        .flat_map(|r| &r.cases)
        .filter(|c| !c.negative_control && c.relation == Relation::Le)
        .map(|c| c.measured / c.bound)
        .fold(0.0, f64::max);
    check(
        failed.is_empty(),
        if failed.is_empty() {
            format!("{n} cases, worst measured/bound {worst:.2e}")
        } else {
            format!("{} of {n} cases failed: {}", failed.len(), failed.join("; "))
        },
    )
}

const CIRCLE: &str = r#"{"kind": "circle", "radius": 1}"#;
const CIRCLE_R2: &str = r#"{"kind": "circle", "radius": 2}"#;
const SEGMENT: &str = r#"{"kind": "segment", "p0": [0, 0], "p1": [1, 0]}"#;
const ARC: &str = r#"{"kind": "arc", "radius": 1, "angle0": 0.3, "angle1": 2.5}"#;
const CYLINDER: &str = r#"{"kind": "cylinder", "radius": 1, "height": 2}"#;
const LENGTH: &str = r#"{"kind": "length"}"#;
const AREA: &str = r#"{"kind": "area"}"#;
const ELASTIC: &str = r#"{"kind": "elastic"}"#;
const CRACK_LENGTH: &str =
    r#"{"kind": "crack", "inner": {"kind": "length"}, "domain": {"kind": "ball", "center": [0, 0, 0], "radius": 3}}"#;

const RADIAL: &str = r#"{"kind": "radial"}"#;
const SCALING: &str = r#"{"kind": "scaling"}"#;
const ROTATION: &str = r#"{"kind": "rotation"}"#;
const E1: &str = r#"{"kind": "constant", "v": [1, 0, 0]}"#;

fn length_hadamard() -> Outcome {
    let start = Instant::now();
    let m = shape(CIRCLE);
    let j = functional(&m, LENGTH);
    let x = field(&m, "radial", RADIAL);
    let a = j.analytic_derivative(&m, &x).map_err(|e| e.to_string())?;
    let fd = eulerian_fd(&j, &m, &x, &FdConfig::default())
        .map_err(|e| e.to_string())?
        .value;
    let wall = start.elapsed();
    let (ra, rf) = (rel(a, TAU), rel(fd, TAU));
    check(
        ra <= 1e-6 && rf <= 1e-6 && rel(fd, a) <= 1e-6 && wall < Duration::from_secs(1),
        format!(
            "analytic {a:.12} (rel {ra:.1e}), fd {fd:.12} (rel {rf:.1e}), {:.3}s",
            wall.as_secs_f64()
        ),
    )
}

fn segment_boundary() -> Outcome {
    let m = shape(SEGMENT);
    let j = functional(&m, LENGTH);
    let cfg = FdConfig::default();
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, json, exact, tol) in [("e1", E1, 0.0, 1e-9), ("x", SCALING, 1.0, 1e-8)] {
        let x = field(&m, name, json);
        let a = j.analytic_derivative(&m, &x).map_err(|e| e.to_string())?;
        let fd = eulerian_fd(&j, &m, &x, &cfg).map_err(|e| e.to_string())?.value;
        ok &= (a - exact).abs() <= tol && (fd - exact).abs() <= tol;
        lines.push(format!(
            "{name}: analytic {a:.3e} fd {fd:.3e} (exact {exact}, tol {tol:.0e})"
        ));
    }
    check(ok, lines.join("; "))
}

fn surface_identity() -> Outcome {
    let m = shape(CYLINDER);
    let j = functional(&m, AREA);
    let tol = Tolerances { rel: 1e-5, abs: 1e-8 };
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, json, exact) in [
        ("radial", RADIAL, 4.0 * PI),
        ("axial_translation", r#"{"kind": "constant", "v": [0, 0, 1]}"#, 0.0),
        (
            "axial_stretch",
            r#"{"kind": "linear", "a": [[0, 0, 0], [0, 0, 0], [0, 0, 1]]}"#,
            4.0 * PI,
        ),
    ] {
        let x = field(&m, name, json);
        let c = compare(&j, &m, &x, &FdConfig::default(), &tol).map_err(|e| e.to_string())?;
        let a = c.report.analytic_value.unwrap_or(f64::NAN);
        let exact_ok = if exact == 0.0 {
            a.abs() <= tol.abs && c.report.fd_value.abs() <= tol.abs
        } else {
            rel(a, exact) <= tol.rel && rel(c.report.fd_value, exact) <= tol.rel
        };
        ok &= c.report.verdict.is_pass() && exact_ok;
        lines.push(format!(
            "{name}: analytic {a:.9} fd {:.9} rel {:.1e}",
            c.report.fd_value, c.report.rel_diff
        ));
    }
    check(ok, lines.join("; "))
}

fn elastic_energy() -> Outcome {
    let m = shape(CIRCLE_R2);
    let j = functional(&m, ELASTIC);
    let cfg = FdConfig::default();
    let radial = field(&m, "radial", RADIAL);
    let a = j.analytic_derivative(&m, &radial).map_err(|e| e.to_string())?;
    let fd = eulerian_fd(&j, &m, &radial, &cfg).map_err(|e| e.to_string())?.value;
    let rot = field(&m, "rotation", ROTATION);
    let ar = j.analytic_derivative(&m, &rot).map_err(|e| e.to_string())?;
    let fr = eulerian_fd(&j, &m, &rot, &cfg).map_err(|e| e.to_string())?.value;
    check(
        rel(a.abs(), FRAC_PI_2) <= 1e-5
            && rel(fd.abs(), FRAC_PI_2) <= 1e-5
            && a.signum() == fd.signum()
            && ar.abs() <= 1e-8
            && fr.abs() <= 1e-8,
        format!("radial: analytic {a:.10} fd {fd:.10}; rotation: analytic {ar:.1e} fd {fr:.1e}"),
    )
}

fn nagumo_invariance() -> Outcome {
    let cfg = SuiteConfig::default();
    let modulated = |axis: &str| {
        format!(
            r#"{{"kind": "modulated", "field": {{"kind": "rotation"}}, "scalar": {{"kind": "affine", "g": {axis}, "c": 1}}}}"#
        )
    };
    let mut results = Vec::new();
    for (shape_json, j_json, g) in [
        (CIRCLE, LENGTH, "[0.3, 0, 0]"),
        (CIRCLE_R2, ELASTIC, "[0.3, 0, 0]"),
        (CYLINDER, AREA, "[0, 0, 0.4]"),
    ] {
        let m = shape(shape_json);
        let j = functional(&m, j_json);
        let fields = [
            field(&m, "rotation", ROTATION),
            field(&m, "rotation_modulated", &modulated(g)),
        ]
        .map(|f| NullityField {
            field: f,
            negative_control: false,
        });
        results.push(tangential_nullity_suite(&j, &m, &fields, &cfg));
    }
    let pinned = cfg.tangency_tol == 1e-12
        && cfg.invariance_tol == 1e-7
        && cfg.nullity_rel == 1e-7
        && cfg.invariance_flow.t_final == 0.5;
    if !pinned {
        return Err(format!("suite bounds differ from the criterion: {cfg:?}"));
    }
    suite_outcome(&results)
}

fn locality() -> Outcome {
    let m = shape(CIRCLE);
    let j = functional(&m, LENGTH);
    let near_bump =
        r#"{"kind": "bump", "center": [1, 0, 0], "radius": 0.5, "dir": {"kind": "constant", "v": [0.3, 1, 0]}}"#;
    let pairs = [
        (
            RADIAL,
            r#"{"kind": "sum", "terms": [{"kind": "radial"}, {"kind": "bump", "center": [3, 0, 0], "radius": 0.5, "dir": {"kind": "constant", "v": [0, 1, 0]}}]}"#,
            false,
        ),
        (SCALING, RADIAL, false),
        (
            ROTATION,
            r#"{"kind": "sum", "terms": [{"kind": "rotation"}, {"kind": "modulated", "field": {"kind": "constant", "v": [1, 1, 0]}, "scalar": {"kind": "sphere_level", "center": [0, 0, 0], "radius": 1}}]}"#,
            false,
        ),
        (
            E1,
            r#"{"kind": "sum", "terms": [{"kind": "constant", "v": [1, 0, 0]}, {"kind": "modulated", "field": {"kind": "radial"}, "scalar": {"kind": "cylinder_level", "radius": 1}}]}"#,
            false,
        ),
        (
            near_bump,
            r#"{"kind": "sum", "terms": [{"kind": "bump", "center": [1, 0, 0], "radius": 0.5, "dir": {"kind": "constant", "v": [0.3, 1, 0]}}, {"kind": "modulated", "field": {"kind": "bump", "center": [1, 0, 0], "radius": 0.5, "dir": {"kind": "constant", "v": [1, 0, 0]}}, "scalar": {"kind": "sphere_level", "center": [0, 0, 0], "radius": 1}}]}"#,
            false,
        ),
        (
            RADIAL,
            r#"{"kind": "scale", "factor": 1.1, "field": {"kind": "radial"}}"#,
            true,
        ),
    ];
    let pairs: Vec<LocalityPair> = pairs
        .iter()
        .enumerate()
        .map(|(i, (x, y, neg))| LocalityPair {
            x: field(&m, &format!("x{i}"), x),
            y: field(&m, &format!("y{i}"), y),
            negative_control: *neg,
        })
        .collect();
    let cfg = SuiteConfig::default();
    if cfg.locality_rel != 1e-6 {
        return Err(format!(
            "locality bound {} differs from the criterion",
            cfg.locality_rel
        ));
    }
    let r = locality_suite(&j, &m, &pairs, &cfg);
    let controls = r.cases.iter().filter(|c| c.negative_control).count();
    if controls == 0 {
        return Err("negative control missing".into());
    }
    suite_outcome(&[r])
}

fn structure_decomposition() -> Outcome {
    let m = shape(SEGMENT);
    let j = functional(&m, LENGTH);
    let cfg = SuiteConfig::default();
    if cfg.decomposition_rel != 1e-6 {
        return Err(format!(
            "decomposition bound {} differs from the criterion",
            cfg.decomposition_rel
        ));
    }
    let fields = random_test_fields(&m, 10, 7);
    suite_outcome(&[normal_dependence_suite(&j, &m, &fields, &cfg)])
}

fn crack_coefficients() -> Outcome {
    let cfg = SuiteConfig::default();
    if cfg.crack_tol != 1e-5 {
        return Err(format!("crack tolerance {} differs from the criterion", cfg.crack_tol));
    }
    let seg = shape(SEGMENT);
    let j = functional(&seg, CRACK_LENGTH);
    let (straight, coef) = crack_suite(&j, seg.as_curve().unwrap(), None, 3, Some((1.0, 1.0)), &cfg);
    let arc = shape(ARC);
    let j = functional(&arc, CRACK_LENGTH);
    let (curved, arc_coef) = crack_suite(&j, arc.as_curve().unwrap(), None, 3, None, &cfg);
    let h_cases = curved
        .cases
        .iter()
        .filter(|c| c.description.contains("h-sample"))
        .count();
    if h_cases == 0 {
        return Err("arc crack produced no h-sample cases".into());
    }
    let detail = suite_outcome(&[straight, curved]);
    let alphas = match (coef, arc_coef) {
        (Some(s), Some(a)) => format!(
            "straight α = ({:.8}, {:.8}), arc α = ({:.8}, {:.8})",
            s.alpha1, s.alpha2, a.alpha1, a.alpha2
        ),
        _ => "coefficients unavailable".into(),
    };
    match detail {
        Ok(d) => Ok(format!("{alphas}; {d}")),
        Err(d) => Err(format!("{alphas}; {d}")),
    }
}

fn numerics_sanity() -> Outcome {
    // RK4 on the rotation field against the exact rotation.
    let m = shape(CIRCLE);
    let rot = field(&m, "rotation", ROTATION);
    let t = 2.0f64;
    let exact = Vec3::new(t.cos(), t.sin(), 0.0);
    let err = |n: usize| -> Result<f64, String> {
        let cfg = FlowConfig::new(t, n).map_err(|e| e.to_string())?;
        Ok((flow_point(&rot, &Vec3::x(), &cfg).map_err(|e| e.to_string())? - exact).norm())
    };
    let ratios: Vec<f64> = [4usize, 8, 16]
        .iter()
        .map(|&n| Ok(err(n)? / err(2 * n)?))
        .collect::<Result<_, String>>()?;
    let ratio_ok = ratios.iter().all(|r| (r - 16.0).abs() <= 2.0);

    // FD error estimates against the exact derivative.
    let cyl = shape(CYLINDER);
    let cases: Vec<(Manifold, &str, &str, f64)> = vec![
        (shape(CIRCLE), LENGTH, RADIAL, TAU),
        (shape(CIRCLE), LENGTH, SCALING, TAU),
        (shape(SEGMENT), LENGTH, SCALING, 1.0),
        (shape(ARC), LENGTH, SCALING, 2.2),
        (shape(CIRCLE_R2), ELASTIC, RADIAL, -FRAC_PI_2),
        (shape(ARC), ELASTIC, SCALING, -2.2),
        (cyl.clone(), AREA, RADIAL, 4.0 * PI),
        (cyl, AREA, SCALING, 8.0 * PI),
    ];
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for (m, j_json, x_json, exact) in &cases {
        let j = functional(m, j_json);
        let x = field(m, "x", x_json);
        let fd = eulerian_fd(&j, m, &x, &FdConfig::default()).map_err(|e| e.to_string())?;
        let ratio = (fd.value - exact).abs() / fd.error_estimate;
        worst = worst.max(ratio);
        if ratio > 10.0 {
            bad.push(format!("{j_json} {x_json}: true/estimate {ratio:.2}"));
        }
    }
    check(
        ratio_ok && bad.is_empty(),
        format!(
            "RK4 halving ratios {:?}; worst true/estimated FD error {worst:.2} over {} exact cases{}",
            ratios.iter().map(|r| (r * 100.0).round() / 100.0).collect::<Vec<_>>(),
            cases.len(),
            if bad.is_empty() {
                String::new()
            } else {
                format!(" — {}", bad.join(", "))
            }
        ),
    )
}

fn run_suite(out: &Path, jobs: Option<&str>) -> Result<(Duration, i32), String> {
    let config = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/bundled_suite.json");
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_shapecalc"));
    cmd.arg("run").arg(&config).arg("--out").arg(out);
    if let Some(j) = jobs {
        cmd.args(["--jobs", j]);
    }
    let start = Instant::now();
    let output = cmd.output().map_err(|e| e.to_string())?;
    Ok((start.elapsed(), output.status.code().unwrap_or(-1)))
}

fn bundled_suite() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let (wall, code) = run_suite(&a, Some("1"))?;
    // The second run uses all cores: the report must not depend on scheduling.
    let (_, code2) = run_suite(&b, None)?;
    let read = |p: &Path| std::fs::read(p.join("report.json")).map_err(|e| e.to_string());
    let stable = read(&a)? == read(&b)?;
    check(
        wall < Duration::from_secs(60) && code == 0 && code2 == 0 && stable,
        format!(
            "single-threaded {:.1}s, exit codes {code}/{code2}, report.json byte-identical: {stable}",
            wall.as_secs_f64()
        ),
    )
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("length Hadamard identity on the unit circle", length_hadamard),
        ("segment boundary terms", segment_boundary),
        ("surface identity on the cylinder", surface_identity),
        ("elastic energy on the circle of radius 2", elastic_energy),
        ("invariance under tangential flows", nagumo_invariance),
        ("locality", locality),
        ("structure decomposition", structure_decomposition),
        ("crack coefficients", crack_coefficients),
        ("numerics sanity", numerics_sanity),
        ("bundled suite", bundled_suite),
    ];
    let mut failed = Vec::new();
    let mut out = std::io::stdout().lock();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        let (verdict, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed.push(n);
                ("FAIL", d)
            }
        };
        // Written past the test harness capture so the lines always appear.
        writeln!(out, "criterion {n:>2} {verdict}: {name} — {detail}").unwrap();
        out.flush().unwrap();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
