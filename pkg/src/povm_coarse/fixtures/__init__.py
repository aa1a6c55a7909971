"""Shipped example documents and the code that regenerates them.

Run ``python -m povm_coarse.fixtures`` to rewrite the JSON files next to
this module.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .. import instruments as ins
from .. import measures as ms
from .. import seqprod as sp
from .. import sic
from ..document import Document, document_of
from ..quantum import DynamicalSystem, State

HERE = Path(__file__).parent


def _example4(d: int) -> Document:
    return document_of(
        d,
        Q=sp.position_observable(d),
        P=sp.momentum_observable(d),
        rho=State.maximally_mixed(d),
        phi0=State.pure(np.eye(d)[0]),
        standard=np.eye(d, dtype=complex),
        fourier=sp.fourier_basis(d),
    )


def build() -> dict[str, Document]:
    space3 = ms.OutcomeSpace.range(3)
    mu = ms.StochasticMatrix(space3, space3, [[0.5, 0.3, 0.2], [0.1, 0.8, 0.1], [0.25, 0.25, 0.5]])
    collapse = ms.StochasticMatrix(space3, ms.OutcomeSpace(("u", "v")), [[1, 0], [1, 0], [0, 1]])
    kernels = _example4(3)
    kernels.put("mu", mu)
    kernels.put("collapse", collapse)

    q2 = sp.position_observable(2)
    instruments = document_of(
        2,
        Q=q2,
        luders_Q=ins.luders(q2),
        prepare_Q=ins.measure_and_prepare(q2, [1.0, 0.0]),
        rho=State([[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]]),
        flip=ms.StochasticMatrix(q2.space, ms.OutcomeSpace(("same", "other")), [[0.9, 0.1], [0.2, 0.8]]),
    )

    dynamics = document_of(
        2,
        Q=q2,
        spin=DynamicalSystem(np.array([[0, 1], [1, 0]]), np.array([1.0, 0.0]), (0.0, 0.25, 0.5, 1.0, 2.0)),
        frozen_phase=DynamicalSystem(np.diag([0.0, 1.0]), np.array([1, 1]) / np.sqrt(2), (0.0, 1.0, 2.0, 3.0)),
    )

    qubit = document_of(
        2,
        C=sic.qubit_C(0.3),
        nu=sic.qubit_nu(0.3),
        standard=np.eye(2, dtype=complex),
        fourier=sp.fourier_basis(2),
    )

    return {
        "example4_d2.json": _example4(2),
        "example4_d3.json": _example4(3),
        "kernels_d3.json": kernels,
        "tetrahedron.json": document_of(2, T=sic.tetrahedron_povm(), rho=State.maximally_mixed(2)),
        "qubit_c.json": qubit,
        "instruments.json": instruments,
        "dynamics.json": dynamics,
    }


def path(name: str) -> Path:
    return HERE / name


def names() -> list[str]:
    return sorted(p.name for p in HERE.glob("*.json"))


def write_all(directory: Path = HERE) -> list[Path]:
    out = []
    for name, doc in build().items():
        target = Path(directory) / name
        doc.write(target)
        out.append(target)
    return out


if __name__ == "__main__":
    for p in write_all():
        print(p)
