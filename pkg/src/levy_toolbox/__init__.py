"""Transition densities of locally alpha-stable Levy-type processes.

Description:
    A process with drift `b(x)`, a state-dependent alpha-stable jump part with intensity `lambda(x)`
    and skewness `rho(x)`, and a residual jump kernel `nu(x, du)` of lower activity is approximated
    over short times by `f_t(x) + t^(1/alpha) U`: a deterministic regressor, the endpoint of a
    flow driven by a mollified drift, plus an alpha-stable innovation whose parameters are the
    coefficients averaged along that flow.

    The package builds that approximation, corrects it with a parametrix series, and checks the
    error rates against Euler simulations of the process.

    Sub-packages:
        - `model`: model definitions, JSON loading and assumption checks.
        - `stable`: stable exponents, densities by Fourier inversion, samplers, fractional operators.
        - `flows`: the mollified drift and the flows `chi`, `kappa`, `chi_t`, `chi-bar`.
        - `regression`: averaged parameters, regression laws and the zero-order density.
        - `kernels`: the kernel families of the error bounds and their properties.
        - `parametrix`: the kernel `Phi`, the resolvent series and the corrected density.
        - `montecarlo`: Euler simulation, distances and the scaling experiment.
        - `experiments`: the pipelines behind the command line.

Usage:
    Run an experiment config with `levy-toolbox run configs/experiments/scaling.json`, or as a
    module with `python -m levy_toolbox run <config>`. Add `--output DIR`, `--seed N`,
    `--workers N` to override the file values.

"""

from __future__ import annotations

from .main import run, setup_logging
