"""Plain-text scenario configuration.

The file format is deliberately primitive so that any language (or a
shell script) can read and write it: one ``key = value`` pair per line,
``#`` starts a comment, blank lines are ignored, and ``[section]``
headers may be used to group keys visually.  The key namespace is flat
-- section headers carry no meaning beyond readability, and a key may
appear at most once in a file.

Unknown keys are rejected rather than ignored: a typo in a tolerance
name should fail loudly, not silently run with the default.
"""

from dataclasses import dataclass, fields, replace

from .errors import ConfigError
from .invariants import SIGMA_1, SIGMA_2

__all__ = ["ScenarioConfig", "parse_config", "load_config"]


_GRID_RANGE = (16, 512)


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything a scenario run depends on, resolved to concrete values."""

    scenario: str = ""
    grid: int = 64
    tau_min: float = -1.0
    tau_max: float = 1.0
    # couplings of the three conserved pieces of the symplectic flux
    sigma0: float = 1.0
    sigma1: float = SIGMA_1
    sigma2: float = SIGMA_2
    # family shape parameters and the finite-difference step for tangents
    amplitude: float = 0.1
    harmonic: int = 3
    lambda1: float = 0.0
    lambda2: float = 0.0
    fd_step: float = 1e-4
    # surface parameters
    radius: float = 1.0
    cap: float = 0.1
    # tolerance gates (exit code 2 when exceeded)
    tol_extremal: float = 1e-6
    tol_integer: float = 1e-3
    tol_slice: float = 1e-5
    tol_relax: float = 1e-4
    max_iterations: int = 20000
    # reporting
    out_dir: str = "reports"
    seed: int = 0

    def validated(self):
        """Return self after range checks; raise ``ConfigError`` otherwise."""
        n = self.grid
        lo, hi = _GRID_RANGE
        if n < lo or n > hi or (n & (n - 1)) != 0:
            raise ConfigError(
                "grid must be a power of two between %d and %d, got %d"
                % (lo, hi, n))
        for key in ("tol_extremal", "tol_integer", "tol_slice", "tol_relax"):
            if getattr(self, key) <= 0.0:
                raise ConfigError("%s must be strictly positive" % key)
        if self.fd_step <= 0.0:
            raise ConfigError("fd_step must be strictly positive")
        if not self.tau_min < self.tau_max:
            raise ConfigError("tau window is empty: [%g, %g)"
                              % (self.tau_min, self.tau_max))
        if self.harmonic < 1:
            raise ConfigError("harmonic must be a positive integer")
        if self.max_iterations < 1:
            raise ConfigError("max_iterations must be a positive integer")
        return self

    @property
    def tau_window(self):
        return (self.tau_min, self.tau_max)

    @property
    def couplings(self):
        return (self.sigma0, self.sigma1, self.sigma2)

    def override(self, **kwargs):
        """Copy with some fields replaced (CLI flags beat file values)."""
        return replace(self, **kwargs).validated()


_FIELD_TYPES = {f.name: f.type for f in fields(ScenarioConfig)}


def _convert(key, text):
    kind = _FIELD_TYPES[key]
    name = kind if isinstance(kind, str) else kind.__name__
    try:
        if name == "int":
            return int(text)
        if name == "float":
            return float(text)
        return text
    except ValueError:
        raise ConfigError("value for %r is not a valid %s: %r"
                          % (key, name, text)) from None


def parse_config(text, source="<string>"):
    """Parse config text into a validated ``ScenarioConfig``."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            continue  # cosmetic section header
        if "=" not in line:
            raise ConfigError("%s:%d: expected 'key = value', got %r"
                              % (source, lineno, raw.strip()))
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _FIELD_TYPES:
            raise ConfigError("%s:%d: unknown key %r" % (source, lineno, key))
        if key in values:
            raise ConfigError("%s:%d: duplicate key %r" % (source, lineno, key))
        values[key] = _convert(key, value)
    return ScenarioConfig(**values).validated()


def load_config(path):
    """Read and parse a config file; missing file is a ``ConfigError``."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError("cannot read config file %s: %s"
                          % (path, exc)) from None
    return parse_config(text, source=str(path))
