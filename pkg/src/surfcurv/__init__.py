"""surfcurv: curvature machinery for translation and homothetical surfaces
in Euclidean and Lorentz-Minkowski 3-space, with a verification suite that
certifies the classified constant-curvature families numerically."""

__version__ = "0.1.0"

from .errors import (AllDegenerateError, CausalityError, DegenerateError,
                     DomainError, ParseError, SingularityError, SpecError,
                     SurfcurvError)
from .jets import (BiJet2, SmoothFn1, UniJet3, bijet_combine, jet_eval,
                   parse_sexpr, poly_expr)
from .geometry import (Character, Curve3, Cylindrical, FundamentalForms,
                       GenericParametric, GraphAxis, HomotheticalGraph, Metric,
                       Surface, TranslationSurface, curve_planarity_residual,
                       curvatures, fundamental_forms, gauss_curvature,
                       homothetical_flat_residual, homothetical_gauss_closed,
                       homothetical_mean_closed, homothetical_minimal_residual,
                       mean_curvature, translation_gauss_closed,
                       translation_mean_closed)
from .catalog import (FAMILY_CLAIMS, FAMILY_NAMES, FamilySpec, family_metric,
                      list_families, make_family, power_params_from_branch)
from .verify import (ConstancyReport, CurvatureSample, ExpBranch,
                     FlatClassification, FlatKind, GridSpec,
                     HomotheticalNonzeroK, PowerBranch, ProbeResult, SampleSet,
                     TanODE, TranslationPlanarGenerator, check_constancy,
                     classify_flat_translation, fd_oracle, nonexistence_probe,
                     ode_crosscheck, sample_curvature)
from .cli import export_obj, parse_surface_spec

__all__ = [name for name in dir() if not name.startswith("_")]
