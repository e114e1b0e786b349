#ifndef HORST_FWI_LBFGS_HPP
#define HORST_FWI_LBFGS_HPP

#include <Eigen/Dense>
#include <deque>
#include <functional>

namespace horst::fwi {

/// Bounded two-loop l-BFGS memory. Pairs with non-positive curvature
/// <s, y> are refused at the door, so the implied inverse Hessian stays
/// positive definite and every direction is a descent direction.
class LbfgsMemory {
 public:
  explicit LbfgsMemory(int m = 5, double init_step = 30.0)
      : m_(m), init_step_(init_step) {}

  /// Store a (model step, gradient step) pair; returns false if the pair
  /// was dropped for lacking positive curvature.
  bool push(const Eigen::VectorXd& s, const Eigen::VectorXd& y);

  /// Two-loop recursion with gamma = <s,y>/<y,y> scaling from the newest
  /// pair. With empty memory: -g * init_step / ||g||_inf, the configurable
  /// first-step size in model units.
  Eigen::VectorXd direction(const Eigen::VectorXd& g) const;

  int size() const { return int(pairs_.size()); }
  void clear() { pairs_.clear(); }

 private:
  struct Pair {
    Eigen::VectorXd s, y;
    double sy = 0.0;
  };
  std::deque<Pair> pairs_;  // oldest first
  int m_ = 5;
  double init_step_ = 30.0;
};

struct WolfeOptions {
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_eval = 20;
  double alpha0 = 1.0;      // first trial step
  double alpha_max = 64.0;  // bracketing never expands past this
};

struct LineSearchResult {
  double alpha = 0.0;   // accepted step, 0 when nothing decreased
  double J = 0.0;       // objective at alpha
  double dphi = 0.0;    // slope at alpha
  int n_eval = 0;
  bool wolfe_ok = false;  // both strong Wolfe inequalities hold
  bool warned = false;    // fell back to the best simple decrease
};

/// Strong Wolfe line search (bracketing + cubic-interpolation zoom) on
/// phi(alpha) = J(m + alpha d). The callable evaluates the objective and
/// writes the slope phi'(alpha) through its second argument. At most
/// max_eval evaluations; if no Wolfe point is found the best strict
/// decrease seen is returned with the warning flag set. phi is guaranteed
/// to have been evaluated last at the returned alpha (callers cache the
/// state of their last evaluation). A non-negative initial slope throws
/// NumericError.
LineSearchResult wolfe_line_search(
    const std::function<double(double, double*)>& phi, double j0, double dphi0,
    const WolfeOptions& opt = {});

} // namespace horst::fwi

#endif
