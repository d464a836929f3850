"""
Reducción a clasificación binaria: modelos denoiser, pérdida, entrenamiento e inversión.
"""

from .models import (
    DenoiserModel,
    DenoiserOutput,
    ExactOracle,
    LogisticModel,
    TabularModel,
    build_model,
    load_model,
    model_from_dict,
    save_model,
)
from .posterior import (
    CLAMP_EPS,
    TrainBatch,
    TrainExample,
    bce_loss,
    bce_loss_array,
    invert_posterior,
    make_train_batch,
    make_train_example,
    noise_posterior_from_posterior,
    oracle_noise_posterior,
)
from .training import max_oracle_error, train

__all__ = [
    'DenoiserModel',
    'DenoiserOutput',
    'ExactOracle',
    'LogisticModel',
    'TabularModel',
    'build_model',
    'load_model',
    'model_from_dict',
    'save_model',
    'CLAMP_EPS',
    'TrainBatch',
    'TrainExample',
    'bce_loss',
    'bce_loss_array',
    'invert_posterior',
    'make_train_batch',
    'make_train_example',
    'noise_posterior_from_posterior',
    'oracle_noise_posterior',
    'max_oracle_error',
    'train',
]
