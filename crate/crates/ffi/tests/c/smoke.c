#include <math.h>
#include <stdio.h>
#include <string.h>

#include "shapecalc.h"

#define CHECK(cond)                                                        \
  do {                                                                     \
    if (!(cond)) {                                                         \
      const char *msg = sc_last_error_message();                           \
      fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #cond,       \
              msg ? msg : "no error");                                     \
      return 1;                                                            \
    }                                                                      \
  } while (0)

int main(void) {
  ScManifold *m = NULL;
  ScField *x = NULL;
  ScFunctional *j = NULL;
  CHECK(sc_manifold_from_json("{\"kind\": \"circle\", \"radius\": 1}", &m) == SC_STATUS_OK);
  CHECK(sc_manifold_dim(m) == 2);
  CHECK(sc_field_from_json("{\"kind\": \"radial\"}", 2, NULL, &x) == SC_STATUS_OK);
  CHECK(sc_functional_from_json("{\"kind\": \"length\"}", m, &j) == SC_STATUS_OK);

  double d = 0.0;
  CHECK(sc_analytic_derivative(j, m, x, &d) == SC_STATUS_OK);
  CHECK(fabs(d - 2.0 * M_PI) < 1e-10);

  double fd = 0.0, err = 0.0;
  CHECK(sc_eulerian_fd(j, m, x, NULL, &fd, &err) == SC_STATUS_OK);
  CHECK(fabs(fd - 2.0 * M_PI) < 1e-6);

  char *report = NULL;
  bool pass = false;
  CHECK(sc_compare(j, m, x, NULL, NULL, &report, &pass) == SC_STATUS_OK);
  CHECK(pass);
  CHECK(strstr(report, "\"verdict\": \"pass\"") != NULL);
  sc_string_free(report);

  CHECK(sc_manifold_from_json("{\"kind\": \"torus\"}", &m) == SC_STATUS_PARSE);
  CHECK(sc_last_error_message() != NULL);

  sc_functional_free(j);
  sc_field_free(x);
  sc_manifold_free(m);
  printf("ok %s\n", sc_version());
  return 0;
}
