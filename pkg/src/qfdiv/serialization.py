"""JSON encodings for matrices, pairs, channels and extended reals."""

import json
import math

import numpy as np

from .errors import InputError
from .states import compression_channel, kraus_channel, make_functional, pinching_channel

PAIR_KEYS = {"rho", "sigma"}


def encode_matrix(m):
    m = np.asarray(m, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def decode_matrix(obj, name="matrix"):
    """Row-major list of rows; entries are ``[re, im]`` pairs or plain reals."""
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise InputError(f"{name}: expected a non-empty list of rows")
    n = len(obj)
    out = np.zeros((n, len(obj[0])), dtype=np.complex128)
    for i, row in enumerate(obj):
        if len(row) != out.shape[1]:
            raise InputError(f"{name}: ragged rows")
        for j, z in enumerate(row):
            if isinstance(z, (int, float)) and not isinstance(z, bool):
                out[i, j] = z
            elif isinstance(z, list) and len(z) == 2 and all(
                    isinstance(x, (int, float)) and not isinstance(x, bool) for x in z):
                out[i, j] = complex(z[0], z[1])
            else:
                raise InputError(f"{name}[{i}][{j}]: entries must be [re, im] or a number")
    return out


def decode_pair(obj):
    if not isinstance(obj, dict):
        raise InputError("pair file must hold a JSON object")
    extra = set(obj) - PAIR_KEYS
    if extra:
        raise InputError(f"unknown keys in pair file: {sorted(extra)}")
    missing = PAIR_KEYS - set(obj)
    if missing:
        raise InputError(f"pair file is missing {sorted(missing)}")
    rho = make_functional(decode_matrix(obj["rho"], "rho"))
    sigma = make_functional(decode_matrix(obj["sigma"], "sigma"))
    if rho.dim != sigma.dim:
        raise InputError("rho and sigma must have equal dimensions")
    return rho, sigma


def encode_pair(rho, sigma):
    return {"rho": encode_matrix(rho.h), "sigma": encode_matrix(sigma.h)}


def decode_channel(obj, dim):
    if not isinstance(obj, dict) or len(obj) != 1:
        raise InputError("channel must be an object with exactly one of kraus/pinching/compression")
    (key, val), = obj.items()
    if key == "kraus":
        return kraus_channel([decode_matrix(k, "kraus") for k in val])
    if key == "pinching":
        return pinching_channel(val, dim)
    if key == "compression":
        return compression_channel(val, dim)
    raise InputError(f"unknown channel kind {key!r}")


def encode_value(x):
    return "inf" if isinstance(x, float) and math.isinf(x) else x


def decode_value(x):
    if x == "inf":
        return math.inf
    return float(x)


def dumps(obj):
    """Deterministic JSON: sorted keys, shortest round-trip float repr."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False)


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc})") from None
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


REVERSE_TEST_KEYS = {"atoms", "value", "verification"}


def decode_reverse_test(obj):
    """Parse the ``{"atoms": [{"nu", "p", "q", "D"}, ...]}`` form written by ``reverse-test``."""
    from .reverse_tests import Atom, ReverseTest

    if not isinstance(obj, dict) or "atoms" not in obj:
        raise InputError("reverse test must be an object with an 'atoms' list")
    extra = set(obj) - REVERSE_TEST_KEYS
    if extra:
        raise InputError(f"unknown keys in reverse test: {sorted(extra)}")
    atoms = []
    for k, a in enumerate(obj["atoms"]):
        if not isinstance(a, dict) or set(a) != {"nu", "p", "q", "D"}:
            raise InputError(f"atom {k}: expected keys nu, p, q, D")
        atoms.append(Atom(float(a["nu"]), decode_matrix(a["D"], f"atoms[{k}].D"), float(a["p"]), float(a["q"])))
    return ReverseTest(tuple(atoms))
