"""Scattering data container and its JSON file format.

The full data set for a steplike potential: reflection and transmission
samples on the continuous spectrum, bound states with norming constants,
and the resonance flag at the lower spectral edge.  Extra blocks carry
derived samples the checker consumes (multiplicity-one transmission at
quadrature nodes, edge ladders, lower-side subsamples).
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError


def _cplx(values):
    return np.asarray(values, dtype=complex)


@dataclass
class EdgeLadder:
    """Samples on a geometric energy ladder approaching one band edge."""

    lam: np.ndarray
    R: np.ndarray
    T: np.ndarray
    W: np.ndarray

    def to_records(self):
        return [
            {
                "lambda": float(l),
                "R": [float(r.real), float(r.imag)],
                "T": [float(t.real), float(t.imag)],
                "W": [float(w.real), float(w.imag)],
            }
            for l, r, t, w in zip(self.lam, self.R, self.T, self.W)
        ]

    @classmethod
    def from_records(cls, records):
        lam = np.array([r["lambda"] for r in records])
        R = _cplx([complex(*r["R"]) for r in records])
        T = _cplx([complex(*r["T"]) for r in records])
        W = _cplx([complex(*r["W"]) for r in records])
        return cls(lam=lam, R=R, T=T, W=W)


@dataclass
class ScatteringData:
    c_plus: float
    c_minus: float

    # uniform momentum grids (k >= 0; the k = 0 slot holds the edge limit)
    # feeding the reflection Fourier transform, one per side
    k_plus: np.ndarray = None
    R_plus_k: np.ndarray = None
    k_minus: np.ndarray = None
    R_minus_k: np.ndarray = None

    # common energy grid on the multiplicity-two spectrum (upper side)
    lam_sigma2: np.ndarray = None
    T_plus: np.ndarray = None
    T_minus: np.ndarray = None
    R_plus: np.ndarray = None
    R_minus: np.ndarray = None

    # multiplicity-one block: Gauss-Legendre nodes in t (lambda = c_low + t^2)
    # with the low-side transmission and reflection samples
    sigma1_t: np.ndarray = None
    sigma1_w: np.ndarray = None
    sigma1_T_low: np.ndarray = None
    sigma1_R_low: np.ndarray = None

    # discrete spectrum
    eigenvalues: np.ndarray = field(default_factory=lambda: np.empty(0))
    gamma_plus: np.ndarray = field(default_factory=lambda: np.empty(0))
    gamma_minus: np.ndarray = field(default_factory=lambda: np.empty(0))
    mu: np.ndarray = field(default_factory=lambda: np.empty(0))

    resonant: bool = False
    gamma_res: float = None

    # edge ladders per side (+1 / -1), lower-side subsample for symmetry checks
    edge: dict = field(default_factory=dict)
    lower: dict = None

    meta: dict = field(default_factory=dict)

    # -- derived ----------------------------------------------------------

    @property
    def c_low(self):
        return min(self.c_plus, self.c_minus)

    @property
    def c_high(self):
        return max(self.c_plus, self.c_minus)

    @property
    def low_side(self):
        """Side whose background is the lower one (+1/-1); -1 on a tie."""
        return -1 if self.c_minus <= self.c_plus else 1

    @property
    def has_sigma1(self):
        return self.c_plus != self.c_minus

    def side_k_grid(self, side):
        return (self.k_plus, self.R_plus_k) if side > 0 else (self.k_minus, self.R_minus_k)

    def validate(self, unitarity_tol=1e-6):
        """Structural screen: definedness, ordering and sign constraints.

        Returns a list of human-readable violations (empty when clean).
        """
        problems = []
        ev = np.asarray(self.eigenvalues, dtype=float)
        if len(ev) and not np.all(np.diff(ev) > 0):
            problems.append("eigenvalues are not strictly increasing")
        if len(ev) and np.any(ev >= self.c_low):
            problems.append("eigenvalues must lie strictly below the lower background")
        for name, g in (("gamma_plus", self.gamma_plus), ("gamma_minus", self.gamma_minus)):
            g = np.asarray(g, dtype=float)
            if len(g) != len(ev):
                problems.append(f"{name} length does not match the eigenvalue count")
            if np.any(g <= 0):
                problems.append(f"invalid norming constant sign: {name} must be positive")
        if len(self.mu) == len(ev) and np.any(np.asarray(self.mu) == 0):
            problems.append("proportionality constants mu must be nonzero")
        for name, R in (("R_plus", self.R_plus), ("R_minus", self.R_minus)):
            if R is not None and np.any(np.abs(R) > 1 + 1e-8):
                problems.append(f"|{name}| exceeds 1 on the sampled spectrum")
        if self.resonant and self.gamma_res in (None, 0.0):
            problems.append("resonant data needs a nonzero edge coefficient")
        return problems

    # -- serialization ------------------------------------------------------

    @staticmethod
    def _coef_records(lam, values):
        return [
            {"lambda": float(l), "re": float(v.real), "im": float(v.imag)}
            for l, v in zip(lam, values)
        ]

    @staticmethod
    def _coef_arrays(records):
        lam = np.array([r["lambda"] for r in records])
        vals = np.array([r["re"] + 1j * r["im"] for r in records])
        return lam, vals

    def to_dict(self):
        d = {
            "c_plus": self.c_plus,
            "c_minus": self.c_minus,
            "resonant": bool(self.resonant),
            "gamma_res": None if self.gamma_res is None else float(self.gamma_res),
            "coefficients": {
                "T_plus": self._coef_records(self.lam_sigma2, self.T_plus),
                "T_minus": self._coef_records(self.lam_sigma2, self.T_minus),
                "R_plus": self._coef_records(self.lam_sigma2, self.R_plus),
                "R_minus": self._coef_records(self.lam_sigma2, self.R_minus),
            },
            "eigenvalues": [
                {
                    "lambda_j": float(l),
                    "gamma_plus": float(gp),
                    "gamma_minus": float(gm),
                    "mu": float(m),
                }
                for l, gp, gm, m in zip(
                    self.eigenvalues, self.gamma_plus, self.gamma_minus, self.mu
                )
            ],
            "fourier": {
                "k_plus": list(map(float, self.k_plus)),
                "R_plus": self._coef_records(self.c_plus + self.k_plus**2, self.R_plus_k),
                "k_minus": list(map(float, self.k_minus)),
                "R_minus": self._coef_records(self.c_minus + self.k_minus**2, self.R_minus_k),
            },
            "meta": dict(self.meta),
        }
        if self.has_sigma1 and self.sigma1_t is not None:
            d["sigma1"] = {
                "t": list(map(float, self.sigma1_t)),
                "weights": list(map(float, self.sigma1_w)),
                "T_low": self._coef_records(self.c_low + self.sigma1_t**2, self.sigma1_T_low),
                "R_low": self._coef_records(self.c_low + self.sigma1_t**2, self.sigma1_R_low),
            }
        if self.edge:
            d["edge_ladders"] = {
                ("plus" if s > 0 else "minus"): ladder.to_records()
                for s, ladder in self.edge.items()
            }
        if self.lower is not None:
            d["lower_side"] = {
                "lambda": list(map(float, self.lower["lam"])),
                **{
                    name: self._coef_records(self.lower["lam"], self.lower[name])
                    for name in ("T_plus", "T_minus", "R_plus", "R_minus")
                    if self.lower.get(name) is not None
                },
            }
        return d

    @classmethod
    def from_dict(cls, d):
        try:
            coeffs = d["coefficients"]
            lam2, T_plus = cls._coef_arrays(coeffs["T_plus"])
            _, T_minus = cls._coef_arrays(coeffs["T_minus"])
            _, R_plus = cls._coef_arrays(coeffs["R_plus"])
            _, R_minus = cls._coef_arrays(coeffs["R_minus"])
            ev = d.get("eigenvalues", [])
            four = d["fourier"]
            _, R_plus_k = cls._coef_arrays(four["R_plus"])
            _, R_minus_k = cls._coef_arrays(four["R_minus"])
            data = cls(
                c_plus=float(d["c_plus"]),
                c_minus=float(d["c_minus"]),
                k_plus=np.array(four["k_plus"], dtype=float),
                R_plus_k=R_plus_k,
                k_minus=np.array(four["k_minus"], dtype=float),
                R_minus_k=R_minus_k,
                lam_sigma2=lam2,
                T_plus=T_plus,
                T_minus=T_minus,
                R_plus=R_plus,
                R_minus=R_minus,
                eigenvalues=np.array([r["lambda_j"] for r in ev]),
                gamma_plus=np.array([r["gamma_plus"] for r in ev]),
                gamma_minus=np.array([r["gamma_minus"] for r in ev]),
                mu=np.array([r["mu"] for r in ev]),
                resonant=bool(d.get("resonant", False)),
                gamma_res=d.get("gamma_res"),
                meta=dict(d.get("meta", {})),
            )
        except KeyError as exc:
            raise DataError(f"scattering data file is missing field {exc}") from None
        if "sigma1" in d:
            s1 = d["sigma1"]
            data.sigma1_t = np.array(s1["t"], dtype=float)
            data.sigma1_w = np.array(s1["weights"], dtype=float)
            _, data.sigma1_T_low = cls._coef_arrays(s1["T_low"])
            _, data.sigma1_R_low = cls._coef_arrays(s1["R_low"])
        for name, side in (("plus", 1), ("minus", -1)):
            recs = d.get("edge_ladders", {}).get(name)
            if recs:
                data.edge[side] = EdgeLadder.from_records(recs)
        if "lower_side" in d:
            low = d["lower_side"]
            data.lower = {"lam": np.array(low["lambda"], dtype=float)}
            for name in ("T_plus", "T_minus", "R_plus", "R_minus"):
                if name in low:
                    _, data.lower[name] = cls._coef_arrays(low[name])
        return data

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            try:
                d = json.load(fh)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
        return cls.from_dict(d)
