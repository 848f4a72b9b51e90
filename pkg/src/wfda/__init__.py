"""Weighted Fisher discriminant analysis in input and kernel feature space.

Class-pair weights reshape the between-class scatter so that close, easily
confused classes dominate the criterion. Weights come from fixed schemes
(APAC, POW, CDM, kNN, cosine) or are learned jointly with the subspace by an
alternating, l0-sparse procedure (AW).
"""
from .autoweight import (AwConfig, FitReport, aw_objective, fit_aw_fda, fit_aw_kfda,
                         grad_weights_feature, grad_weights_input, l0_project)
from .dataset import (ClassStatistics, LabeledDataset, SplitSpec, Standardizer,
                      class_statistics, ingest_csv, ingest_image_dir, make_gaussian_classes,
                      split, standardize_apply, standardize_fit)
from .errors import (DegenerateGeometryError, DegenerateWeightsError, IngestionError,
                     InvalidInputError, InvalidParameterError, NumericalError,
                     UnsupportedOperationError, WfdaError)
from .evaluate import (ExperimentReport, export_fisherfaces, export_weights, one_nn_accuracy,
                       run_experiment_matrix)
from .fda import fit_fda, fit_weighted_fda
from .kfda import KernelSpec, fit_kfda, fit_weighted_kfda, gram
from .linalg import CholeskyEigensolver, generalized_eig
from .methods import MethodSpec, fit_method, parse_method, parse_methods
from .model import (DiscriminantModel, kernel_project, load_model, project, save_model,
                    transform)
from .scatter import (between_scatter, normalized_weighted_between_scatter,
                      weighted_between_scatter, within_scatter)
from .weighting import (WeightMatrix, apac_weights, cdm_weights, class_distances,
                        cosine_weights, kernel_cosine_weights, knn_weights, pow_weights)

__version__ = "0.1.0"
