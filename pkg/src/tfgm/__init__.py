"""Component separation of nonstationary signals via pixel graphs on time-frequency planes."""

from .graph import (ComponentSet, GraphConfig, SelectionPolicy, build_components,
                    component_to_mask, select_components)
from .methods import MethodConfig, method_presets, run_method
from .noise import ThresholdSpec, estimate_gamma, method_threshold
from .reconstruct import ComponentEstimate, invert_masked, match_components, rel_error
from .signals import (Signal, add_noise, gen_exponential_chirp, gen_hermite, gen_impulse,
                      gen_linear_chirp, gen_sinusoidal_chirp, gen_tone, mix, snr_db)
from .tfr import (TFR, Window, gaussian_window, reassignment_operator, smooth_modulus, sst,
                  stft, synchrosqueeze, window_for)

__version__ = "0.1.0"
