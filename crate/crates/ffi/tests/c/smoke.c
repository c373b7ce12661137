#include <math.h>
#include <stdio.h>
#include "surrogate_regret.h"

#define CHECK(cond)                                              \
  do {                                                           \
    if (!(cond)) {                                               \
      fprintf(stderr, "line %d: %s\n", __LINE__, #cond);         \
      return 1;                                                  \
    }                                                            \
  } while (0)

int main(void) {
  SrLoss *hinge = NULL;
  CHECK(sr_loss_uneven_new(SR_FAMILY_HINGE, 0.5, 2.0, NULL, &hinge) == SR_STATUS_OK);

  double v = 0.0;
  CHECK(sr_optimal_conditional_risk(hinge, 0.75, &v) == SR_STATUS_OK);
  CHECK(fabs(v - 0.375) < 1e-12);

  bool calibrated = false;
  double witness = 0.0;
  CHECK(sr_check_calibrated(hinge, 0.5, &calibrated, &witness) == SR_STATUS_OK);
  CHECK(calibrated);

  SrLoss *weighted = NULL;
  CHECK(sr_loss_alpha_transform(hinge, 0.3, &weighted) == SR_STATUS_OK);
  CHECK(sr_h_alpha(weighted, 0.3, 0.5, &v) == SR_STATUS_OK);
  CHECK(fabs(v - 0.2) < 1e-12);

  SrLoss *uneven = NULL;
  CHECK(sr_loss_uneven_new(SR_FAMILY_HINGE, 1.0, 2.0, NULL, &uneven) == SR_STATUS_OK);
  CHECK(sr_regret_bound(uneven, 0.5, 0.1, 201, &v) == SR_STATUS_VACUOUS_BOUND);
  char msg[256];
  CHECK(sr_last_error_message(msg, sizeof msg) > 0);
  printf("%s: %s\n", sr_status_name(SR_STATUS_VACUOUS_BOUND), msg);

  CHECK(sr_alpha_of_gamma(2.0, 1e-12, &v) == SR_STATUS_OK);
  CHECK(fabs(v - (3.0 + 4.0 * sqrt(2.0)) / 23.0) < 1e-10);
  CHECK(sr_conditional_risk(NULL, 0.5, 0.0, &v) == SR_STATUS_NULL_POINTER);

  sr_loss_free(uneven);
  sr_loss_free(weighted);
  sr_loss_free(hinge);
  printf("ok\n");
  return 0;
}
