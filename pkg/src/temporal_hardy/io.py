"""JSON setting/report files.

Complex numbers are written as ``[re, im]`` pairs.  Output is canonical:
sorted keys and every float printed with 17 significant digits, so a file
written here parses back to bit-identical arrays and re-serializes to the
same text.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from . import __version__
from .hardy import HardyError, MeasurementSetting, Observable
from .qcore import DEFAULT_CLUSTER_TOL, as_state

SETTING_SCHEMA = "temporal-hardy.setting"
REPORT_SCHEMA = "temporal-hardy.report"
SCHEMA_VERSION = 1


class SettingFileError(ValueError):
    pass


def _float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite float {x!r}")
    s = "%.17g" % x
    if not any(ch in s for ch in ".eE"):
        s += ".0"
    return s


def dumps_canonical(obj, indent: int = 0) -> str:
    """JSON text with sorted keys and 17-significant-digit floats."""
    pad = " " * indent

    def enc(o, level):
        if isinstance(o, dict):
            if not o:
                return "{}"
            inner = pad * (level + 1)
            items = [f"{inner}{json.dumps(str(k))}: {enc(o[k], level + 1)}" for k in sorted(o)]
            sep = ",\n" if indent else ", "
            if indent:
                return "{\n" + sep.join(items) + "\n" + pad * level + "}"
            return "{" + sep.join(i.strip() for i in items) + "}"
        if isinstance(o, (list, tuple)):
            return "[" + ", ".join(enc(v, level + 1) for v in o) + "]"
        if isinstance(o, (bool, np.bool_)):
            return "true" if o else "false"
        if o is None:
            return "null"
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return _float(o)
        if isinstance(o, np.ndarray):
            return enc(o.tolist(), level)
        if isinstance(o, str):
            return json.dumps(o)
        raise TypeError(f"cannot serialize {type(o).__name__}")

    return enc(obj, 0) + "\n"


def complex_to_pairs(a) -> list:
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def pairs_to_complex(data, name: str) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError):
        raise SettingFileError(f"{name}: entries must be [re, im] number pairs") from None
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise SettingFileError(f"{name}: entries must be [re, im] number pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def setting_to_dict(setting: MeasurementSetting, psi=None) -> dict:
    out = {
        "schema": SETTING_SCHEMA,
        "schema_version": SCHEMA_VERSION,
        "dim": setting.dim,
        "observables": {
            key: {"matrix": complex_to_pairs(obs.matrix), "outcome": obs.outcome}
            for key, obs in setting.observables().items()
        },
    }
    if psi is not None:
        out["state"] = complex_to_pairs(psi)
    return out


def setting_from_dict(data: dict, cluster_tol: float = DEFAULT_CLUSTER_TOL):
    """Parse a setting dict; returns ``(setting, psi)`` with ``psi`` possibly None."""
    if not isinstance(data, dict):
        raise SettingFileError("setting file must hold a JSON object")
    if data.get("schema", SETTING_SCHEMA) != SETTING_SCHEMA:
        raise SettingFileError(f"unexpected schema {data.get('schema')!r}")
    try:
        dim = int(data["dim"])
        obs_data = data["observables"]
    except (KeyError, TypeError, ValueError):
        raise SettingFileError("setting file needs integer 'dim' and an 'observables' object") from None
    observables = {}
    for key in ("A1", "A2", "B1", "B2"):
        if key not in obs_data:
            raise SettingFileError(f"observable {key} is missing")
        entry = obs_data[key]
        M = pairs_to_complex(entry.get("matrix"), f"observable {key}")
        if M.shape != (dim, dim):
            raise SettingFileError(f"observable {key}: expected a {dim}x{dim} matrix, got {M.shape}")
        try:
            observables[key] = Observable(M, float(entry["outcome"]), key, cluster_tol)
        except (KeyError, TypeError):
            raise SettingFileError(f"observable {key}: missing numeric 'outcome'") from None
        except HardyError as exc:
            raise SettingFileError(f"observable {exc}") from None
        except ValueError as exc:
            raise SettingFileError(f"observable {key}: {exc}") from None
    psi = None
    if data.get("state") is not None:
        try:
            psi = as_state(pairs_to_complex(data["state"], "state"), dim)
        except ValueError as exc:
            raise SettingFileError(str(exc)) from None
    return MeasurementSetting(**observables), psi


def write_setting(path, setting: MeasurementSetting, psi=None):
    Path(path).write_text(dumps_canonical(setting_to_dict(setting, psi), indent=1))


def read_setting(path, cluster_tol: float = DEFAULT_CLUSTER_TOL):
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise SettingFileError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise SettingFileError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return setting_from_dict(data, cluster_tol)


def make_report(command: str, payload: dict, *, seed=None, tolerances=None, **meta) -> dict:
    report = {
        "schema": REPORT_SCHEMA,
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "version": __version__,
        "seed": seed,
        "tolerances": tolerances or {},
        "payload": payload,
    }
    report.update(meta)
    return report
