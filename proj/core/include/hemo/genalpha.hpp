#ifndef HEMO_GENALPHA_HPP
#define HEMO_GENALPHA_HPP

namespace hemo {

/// Generalized-alpha coefficients for first-order systems, parametrized by
/// the high-frequency spectral radius rho_inf.
struct GenAlphaParams {
  double rho_inf = 0.5;
  double alpha_m = 5.0 / 6.0;
  double alpha_f = 2.0 / 3.0;
  double gamma = 2.0 / 3.0;
};

/// Throws ConfigError unless 0 <= rho_inf <= 1.
GenAlphaParams genalpha_params(double rho_inf);

}  // namespace hemo

#endif  // HEMO_GENALPHA_HPP
