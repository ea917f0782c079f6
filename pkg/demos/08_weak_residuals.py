"""Distributional residuals against a compactly supported test function.

A weak solution makes the space-time pairing of each equation with any
smooth bump vanish.  Discrete runs leave an O(h) residue (first-order
upwind transport); refining the grid shrinks every residual: mass,
magnetic, momentum, and the T_k-renormalized identity whose cut-off
nonlinearity h(z) = T_k(z) is exactly the one used to control low
integrability in the second limit passage.
"""

import numpy as np

import mhd2d as m

init = m.InitialDataSpec(
    kind="ratio-profile", rho_amp=0.1, kx=1, ky=1,
    ratio_mid=1.0, ratio_amp=0.25, jx=1, jy=0, u_amp=0.3,
)

print(f"{'grid':>6} {'mass':>11} {'magnetic':>11} {'momentum':>11} {'Tk(rho)':>11} {'Tk(b)':>11}")
prev = None
for n, nrec in ((32, 21), (64, 41)):
    params = m.validate_params(m.SimulationParams(
        nx=n, ny=n, eps=0.0, delta=0.0, gamma=1.4, t_final=0.5))
    config = m.Config(params=params, init=init)
    traj, _ = m.run(config, record_times=list(np.linspace(0.0, 0.5, nrec)))
    bump = m.TestFunction.centered_in(traj.grid, 0.5)
    row = [
        m.weak_residual(traj, bump, "mass"),
        m.weak_residual(traj, bump, "magnetic"),
        m.weak_residual(traj, bump, "momentum"),
        m.renormalized_residual(traj, bump, "tk", 1.0, "mass"),
        m.renormalized_residual(traj, bump, "tk", 1.0, "b"),
    ]
    print(f"{n:>4}^2 " + " ".join(f"{v:11.3e}" for v in row))
    if prev is not None:
        print("ratio  " + " ".join(f"{abs(a) / abs(b):11.2f}" for a, b in zip(prev, row)))
    prev = row

print("\nhalving h roughly halves each residual: the discrete runs converge")
print("toward distributional solutions at the transport scheme's first order")
