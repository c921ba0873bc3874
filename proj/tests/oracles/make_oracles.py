#!/usr/bin/env python3
# Copyright 2026 The nmq Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Reference values for the C++ tests.

Everything here works on density matrices with a fixed-step RK4 integrator
and shares no code or basis conventions with the library. The output is
frozen into frozen.json; rerun only when adding cases.

    python3 make_oracles.py > frozen.json
"""

import json

import numpy as np
from scipy.interpolate import CubicSpline

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
SM = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|


def lindblad(h, jumps):
    def rhs(rho):
        out = -1j * (h @ rho - rho @ h)
        for rate, l in jumps:
            if rate == 0.0:
                continue
            ld = l.conj().T
            out += rate * (l @ rho @ ld - 0.5 * (ld @ l @ rho + rho @ ld @ l))
        return out
    return rhs


def rk4(rhs, rho, t, step):
    n = max(1, int(round(t / step)))
    dt = t / n
    for _ in range(n):
        k1 = rhs(rho)
        k2 = rhs(rho + 0.5 * dt * k1)
        k3 = rhs(rho + 0.5 * dt * k2)
        k4 = rhs(rho + dt * k3)
        rho = rho + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return rho


def bloch(rho):
    return [float(np.trace(rho @ p).real) for p in (SX, SY, SZ)]


def qubit_marginal(rho4):
    r = rho4.reshape(2, 2, 2, 2)
    return np.einsum("ajbj->ab", r)


def plus():
    v = np.array([1, 1], dtype=complex) / np.sqrt(2)
    return np.outer(v, v.conj())


def markov_rhs(dw, gad, gd, drive=0.0):
    h = drive * SX + dw * SZ
    return lindblad(h, [(gad, SM), (gd, SZ)])


def tls_rhs(dw, gad, gd, nu, kappa, drive=0.0):
    h = np.kron(drive * SX + dw * SZ, I2) + nu * np.kron(SZ, SX)
    return lindblad(h, [(gad, np.kron(SM, I2)), (gd, np.kron(SZ, I2)), (kappa, np.kron(I2, SM))])


def evolve_samples(rhs, rho0, times, step, reduce=None):
    out = []
    rho = rho0
    t_prev = 0.0
    for t in times:
        rho = rk4(rhs, rho, t - t_prev, step)
        t_prev = t
        out.append(bloch(reduce(rho) if reduce else rho))
    return out


def pseudoidentity_series(params, theta_full, m, n_values, step=0.0025):
    """Bloch vectors after n mirrored pseudoidentities.

    The second half uses a negated drive instead of frame changes.
    """
    kind = params["model"]
    drive = theta_full / m / 2.0
    if kind == "markovian":
        fwd = markov_rhs(params["delta_omega"], params["gamma_ad"], params["gamma_d"], drive)
        bwd = markov_rhs(params["delta_omega"], params["gamma_ad"], params["gamma_d"], -drive)
        rho = plus()
        reduce = None
    else:
        args = (params["delta_omega"], params["gamma_ad"], params["gamma_d"], params["nu_zx"], params["kappa"])
        fwd = tls_rhs(*args, drive)
        bwd = tls_rhs(*args, -drive)
        rho = np.kron(plus(), np.array([[1, 0], [0, 0]], dtype=complex))
        reduce = qubit_marginal
    out = {}
    n_done = 0
    for n in sorted(n_values):
        while n_done < n:
            rho = rk4(fwd, rho, float(m), step)
            rho = rk4(bwd, rho, float(m), step)
            n_done += 1
        out[str(n)] = bloch(reduce(rho) if reduce else rho)
    return out


def main():
    times = [0.5, 1.0, 5.0, 10.0, 25.0, 50.0]
    step = 0.002
    frozen = {}

    frozen["dephasing"] = {
        "gamma_d": 0.05, "times": times,
        "bloch": evolve_samples(markov_rhs(0.0, 0.0, 0.05), plus(), times, step),
    }
    excited = np.array([[0, 0], [0, 1]], dtype=complex)
    frozen["amplitude_damping"] = {
        "gamma_ad": 0.02, "times": times,
        "from_excited": evolve_samples(markov_rhs(0.0, 0.02, 0.0), excited, times, step),
        "from_plus": evolve_samples(markov_rhs(0.0, 0.02, 0.0), plus(), times, step),
    }
    frozen["markovian_mixed"] = {
        "params": {"delta_omega": 0.0, "gamma_ad": 0.01, "gamma_d": 0.02}, "times": times,
        "bloch": evolve_samples(markov_rhs(0.0, 0.01, 0.02), plus(), times, step),
    }

    tls_times = [1.0, 5.0, 10.0, 20.0, 40.0, 80.0]
    rho_tls = np.kron(plus(), np.array([[1, 0], [0, 0]], dtype=complex))
    frozen["tls_idle_dissipative"] = {
        "params": {"delta_omega": 0.1, "gamma_ad": 0.0, "gamma_d": 0.01, "nu_zx": 0.05, "kappa": 0.08},
        "times": tls_times,
        "bloch": evolve_samples(tls_rhs(0.1, 0.0, 0.01, 0.05, 0.08), rho_tls, tls_times, step, qubit_marginal),
    }
    frozen["tls_idle_with_qubit_damping"] = {
        "params": {"delta_omega": 0.03, "gamma_ad": 0.004, "gamma_d": 0.002, "nu_zx": 0.02, "kappa": 0.03},
        "times": tls_times,
        "bloch": evolve_samples(tls_rhs(0.03, 0.004, 0.002, 0.02, 0.03), rho_tls, tls_times, step,
                                qubit_marginal),
    }
    # PMME (dw=0.1, gd=0.01, gamma_z=0.005, b=0.02) has the same qubit dynamics as a
    # defect with nu = sqrt(gamma_z/2) = 0.05 and kappa = 2 (b + 4 nu^2) = 0.06.
    frozen["pmme_generic_via_tls"] = {
        "params": {"delta_omega": 0.1, "gamma_ad": 0.0, "gamma_d": 0.01, "gamma_z": 0.005, "b": 0.02},
        "times": tls_times,
        "bloch": evolve_samples(tls_rhs(0.1, 0.0, 0.01, 0.05, 0.06), rho_tls, tls_times, step, qubit_marginal),
    }

    n_values = [0, 1, 2, 5, 10]
    cases = [
        ("markovian_pi", {"model": "markovian", "delta_omega": 0.01, "gamma_ad": 0.002, "gamma_d": 0.003}, np.pi),
        ("markovian_3pi_5", {"model": "markovian", "delta_omega": -0.02, "gamma_ad": 0.001, "gamma_d": 0.0},
         3 * np.pi / 5),
        ("tls_2pi_5", {"model": "qubit_tls", "delta_omega": 0.01, "gamma_ad": 0.001, "gamma_d": 0.002,
                       "nu_zx": 0.03, "kappa": 0.01}, 2 * np.pi / 5),
        ("tls_idle", {"model": "qubit_tls", "delta_omega": 0.005, "gamma_ad": 0.0, "gamma_d": 0.001,
                      "nu_zx": 0.02, "kappa": 0.0}, 0.0),
    ]
    frozen["pseudoidentity"] = []
    for name, params, theta in cases:
        frozen["pseudoidentity"].append({
            "name": name, "params": params, "theta_full": theta, "m": 4,
            "trajectory": pseudoidentity_series(params, theta, 4, n_values),
        })

    # Natural cubic spline through samples of a cubic on [0, 150] step 10.
    knots = np.arange(0.0, 151.0, 10.0)
    poly = lambda x: 1e-6 * (x - 40.0) * (x - 90.0) * (x - 130.0)
    spline = CubicSpline(knots, poly(knots), bc_type="natural")
    probe = [5.0, 35.0, 75.0, 112.0, 145.0]
    frozen["natural_spline"] = {
        "knots": knots.tolist(), "values": poly(knots).tolist(), "probe": probe,
        "spline": spline(probe).tolist(), "polynomial": poly(np.array(probe)).tolist(),
    }

    print(json.dumps(frozen, indent=1))


if __name__ == "__main__":
    main()
