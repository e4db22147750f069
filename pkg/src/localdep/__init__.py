"""Local dependence measures: δ-localized deviations, ε-neighbourhood L¹ residuals,
Chatterjee's ξ and the moment-based η⁽²⁾."""

__version__ = "0.1.0"

from .core import (DataError, OrderedSample, PairedSample, UnitSquareSample, empirical_pit,
                   load_sample, order_by_x, read_csv)
from .localdelta import adjacent_l1, deviation_matrix, local_delta_mean, row_means, scalar_mean
from .epsresid import (EpsilonNeighborhoods, ResidualEstimate, local_average, neighborhoods,
                       xi_from_zeta, zeta_hat, zeta_limit)
from .chatterjee import XiReport, chatterjee_xi, chatterjee_xi_large
from .moment import (ConditionalMeanFit, L2Report, cond_mean_binned, cond_mean_knn, eta2_binned,
                     eta2_knn, l2_report, r_squared_ols)
from .synth import GeneratorSpec, gen, normal_cdf
from .oracle import xi_bruteforce, zeta_bruteforce
