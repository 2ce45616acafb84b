#pragma once

namespace netinf {

/// A point in ROC space: false positive ratio and true positive ratio.
struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

}  // namespace netinf
