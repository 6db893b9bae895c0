"""File formats: tensor sets, channels, CSV tables.

JSON floats are serialized with Python's shortest round-trip repr, so a
fixed input produces byte-identical output files.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import ContractViolationError
from .gaussian import GaussianChannel
from .lattice import LatticeSpec, Site
from .tensors import FPEPSTensor, PEPSTensor


def load_tensor_set(path) -> tuple[LatticeSpec, dict[Site, int], dict[Site, FPEPSTensor]]:
    data = json.loads(Path(path).read_text())
    lat = LatticeSpec(int(data["lattice"]["nh"]), int(data["lattice"]["nv"]))
    parity_rows = data.get("parity")
    parity: dict[Site, int] = {}
    for v in range(1, lat.n_v + 1):
        for h in range(1, lat.n_h + 1):
            parity[(h, v)] = (
                int(parity_rows[v - 1][h - 1]) if parity_rows is not None else 0
            )
    tensors: dict[Site, FPEPSTensor] = {}
    for entry in data["tensors"]:
        site = (int(entry["site"][0]), int(entry["site"][1]))
        arr = np.zeros((2,) * 5, dtype=complex)
        for item in entry["entries"]:
            arr[item["k"], item["l"], item["r"], item["u"], item["d"]] = complex(
                item["re"], item["im"]
            )
        tensors[site] = FPEPSTensor(arr, parity[site])
    missing = [s for s in lat.sites() if s not in tensors]
    if missing:
        raise ContractViolationError(f"tensor-set file missing sites {missing}")
    return lat, parity, tensors


def dump_tensor_set(
    lattice: LatticeSpec, parity: dict[Site, int], tensors: dict[Site, FPEPSTensor]
) -> str:
    payload = {
        "lattice": {"nh": lattice.n_h, "nv": lattice.n_v},
        "parity": [
            [parity[(h, v)] for h in range(1, lattice.n_h + 1)]
            for v in range(1, lattice.n_v + 1)
        ],
        "tensors": [
            {
                "site": list(site),
                "entries": [
                    {
                        "k": k, "l": l, "r": r, "u": u, "d": d,
                        "re": val.real, "im": val.imag,
                    }
                    for (k, l, r, u, d), val in tensors[site].nonzero_items()
                ],
            }
            for site in lattice.sites()
        ],
    }
    return json.dumps(payload, indent=1)


def dump_peps_set(lattice: LatticeSpec, tensors: dict[Site, PEPSTensor]) -> str:
    payload = {
        "lattice": {"nh": lattice.n_h, "nv": lattice.n_v},
        "tensors": [
            {
                "site": list(site),
                "entries": [
                    {
                        "k": int(idx[0]), "l": int(idx[1]), "lp": int(idx[2]),
                        "r": int(idx[3]), "rp": int(idx[4]),
                        "u": int(idx[5]), "d": int(idx[6]),
                        "re": tensors[site].entries[idx].real,
                        "im": tensors[site].entries[idx].imag,
                    }
                    for idx in np.ndindex(*(2,) * 7)
                    if tensors[site].entries[idx] != 0
                ],
            }
            for site in lattice.sites()
        ],
    }
    return json.dumps(payload, indent=1)


def load_peps_set(path) -> tuple[LatticeSpec, dict[Site, PEPSTensor]]:
    data = json.loads(Path(path).read_text())
    lat = LatticeSpec(int(data["lattice"]["nh"]), int(data["lattice"]["nv"]))
    tensors: dict[Site, PEPSTensor] = {}
    for entry in data["tensors"]:
        site = (int(entry["site"][0]), int(entry["site"][1]))
        arr = np.zeros((2,) * 7, dtype=complex)
        for item in entry["entries"]:
            arr[
                item["k"], item["l"], item["lp"], item["r"], item["rp"],
                item["u"], item["d"],
            ] = complex(item["re"], item["im"])
        tensors[site] = PEPSTensor(arr)
    return lat, tensors


def dump_channel(channel: GaussianChannel) -> str:
    return json.dumps({
        "p_modes": channel.p_modes,
        "q_modes": channel.q_modes,
        "A": channel.A.tolist(),
        "B": channel.B.tolist(),
        "D": channel.D.tolist(),
    }, indent=1)


def load_channel(path) -> GaussianChannel:
    data = json.loads(Path(path).read_text())
    ch = GaussianChannel(
        np.asarray(data["A"], dtype=float),
        np.asarray(data["B"], dtype=float),
        np.asarray(data["D"], dtype=float),
    )
    if ch.p_modes != int(data["p_modes"]) or ch.q_modes != int(data["q_modes"]):
        raise ContractViolationError("channel file mode counts do not match blocks")
    return ch


def format_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (np.floating,)):
        return repr(float(value))
    return str(value)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(x) for x in row])
