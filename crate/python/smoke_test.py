"""Smoke test for the mechent Python extension.

Build and install first:  pip install --no-build-isolation -e crates/py
"""

import math

import mechent


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    cm = mechent.CovMat.from_normal_form(12.83, 13.89, 13.13)
    assert cm.is_physical()

    report = mechent.entanglement_report(cm)
    assert close(report["delta_epr"], 0.46, 1e-9), report
    assert close(report["discord"], 1.56, 0.02), report
    assert close(mechent.log_negativity(cm), report["e_n"], 0.0)

    r, phi, n1, n2 = mechent.tmst_from_cm(cm)
    back = mechent.cm_from_tmst(r, phi, n1, n2).to_list()
    assert all(close(x, y, 1e-9) for row_a, row_b in zip(back, cm.to_list()) for x, y in zip(row_a, row_b))

    vac = mechent.CovMat.vacuum()
    assert mechent.epr_duan(vac, 0.3)["delta_epr"] == 1.0
    assert close(mechent.wigner_density(vac, [0.0] * 4), 1.0 / math.pi**2, 1e-15)
    assert mechent.CovMat.from_json(cm.to_json()).to_list() == cm.to_list()

    try:
        mechent.CovMat([[0.1, 0, 0, 0], [0, 0.1, 0, 0], [0, 0, 0.1, 0], [0, 0, 0, 0.1]])
    except ValueError as e:
        assert "unphysical" in str(e)
    else:
        raise AssertionError("unphysical matrix accepted")

    a = mechent.scattering_coefficients(0.0, 67.0, 113.3, 1.0, 1.0, 3.0e6, 3.0e6, 37.7)
    assert close(abs(a["a1"]) ** 2 - abs(a["a12"]) ** 2 - abs(a["a1m"]) ** 2, 1.0, 1e-9)

    op = mechent.operating_point()
    assert op["stability"]["stable"]
    rows = mechent.power_sweep([-90.0, -84.4])
    assert not rows[0]["stable"] and rows[1]["stable"]
    assert mechent.output_cm().is_physical()

    est = mechent.virtual_measurement(cm, 216000, 604800, seed=7)
    for i in range(4):
        for j in range(4):
            assert abs(est["v"][i][j] - cm.to_list()[i][j]) < 4 * est["se"][i][j], (i, j)

    fit_truth = dict(gain_db=83.2, n_add=8.3)
    temps = [0.007 + 0.4 * k for k in range(10)]
    hbar, kb = 1.054571817e-34, 1.380649e-23
    omega = 2 * math.pi * 10.17e9
    zeta = 10 ** (fit_truth["gain_db"] / 10) * 50.0 * 100.0 * hbar * omega
    noise = [zeta * (0.5 / math.tanh(hbar * omega / (2 * kb * t)) + fit_truth["n_add"]) for t in temps]
    fit = mechent.calibrate_chain(temps, noise, [0.0] * len(temps), 10.17e9)
    assert close(fit["gain_db"], 83.2, 1e-6) and close(fit["n_add"], 8.3, 1e-6), fit

    print("mechent smoke test ok")


if __name__ == "__main__":
    main()
