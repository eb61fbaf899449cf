#include "nclearn/data.hpp"
#include "nclearn/errors.hpp"
#include "nclearn/ncbs.hpp"
#include "nclearn/ncfw.hpp"

namespace nclearn {

double bayes_oracle(const SyntheticSpec& spec, const MeasureSpec& measure, std::size_t eval_points,
                    Rng& rng, std::size_t steps) {
  if (eval_points == 0) throw ConfigError("bayes_oracle: eval_points must be positive");
  if (measure.n != spec.n) throw ShapeMismatch("bayes_oracle: measure/spec class counts differ");
  const Dataset sample = gen_synthetic(spec, eval_points, rng);

  // exact class probabilities stand in for the learned CPE
  Matrix probs(sample.size(), spec.n);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const std::vector<double> eta = true_eta(spec, sample.row(i));
    std::copy(eta.begin(), eta.end(), probs.row_ptr(i));
  }

  const NoiseModel identity = NoiseModel::identity(spec.n);
  if (measure.monotonic_convex()) {
    const std::size_t t = steps == 0 ? 5000 : steps;
    const FwCoreResult core = fw_core(measure, probs, sample.labels, identity, t);
    return core.trace.steps.back().psi;
  }
  const std::size_t t = steps == 0 ? 200 : steps;
  const BsCoreResult core = bs_core(measure.a, measure.b, probs, sample.labels, identity, t);
  const ConfusionMatrix c = confusion_from_probs(probs, sample.labels, core.final_loss);
  return evaluate(measure, c);
}

}  // namespace nclearn
