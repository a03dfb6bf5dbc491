"""How much hopping survives the polaron dressing.

A fermion hopping between two sites drags its boson cloud along. Displacing
the bath (Lang-Firsov style) trades the strong site-bath coupling for an
exponentially reduced hopping amplitude

    Jt / J = exp(-lam * (1/2 - F[s] / s)),   F[z] = int_0^inf e^{-t^2} sin(zt) dt

with lam the effective coupling and s the scattering time scale (site
separation over phonon speed, in cutoff units). Two knobs, one message: the
qubit splitting shrinks fast once the bath can resolve the two sites.
"""

import os

import numpy as np

from polaron_deco import BathModel, effective_hopping_ratio
from polaron_deco.output import ensure_dir, write_csv, write_svg

out_dir = ensure_dir(os.path.join(os.path.dirname(__file__), "out", "01_dressed_hopping"))

# ratio vs coupling, one curve per scattering scale
lams = np.linspace(0.0, 2.0, 81)
s_list = (1.0, 5.0, 10.0)
curves = {
    f"s={s:g}": [effective_hopping_ratio(BathModel(lambda_g=l, s=s)) for l in lams]
    for s in s_list
}
write_csv(os.path.join(out_dir, "ratio_vs_coupling.csv"),
          ["lambda_g"] + list(curves), [lams] + list(curves.values()))
write_svg(os.path.join(out_dir, "ratio_vs_coupling.svg"), lams, curves,
          title="dressed hopping vs coupling", x_label="lambda_g", y_label="Jt/J")

# ratio vs scattering scale, one curve per coupling
ss = np.logspace(-1, 2, 61)
curves_s = {
    f"lam={l:g}": [effective_hopping_ratio(BathModel(lambda_g=l, s=s)) for s in ss]
    for l in (0.5, 1.0, 2.0)
}
write_csv(os.path.join(out_dir, "ratio_vs_scale.csv"),
          ["s"] + list(curves_s), [ss] + list(curves_s.values()))
write_svg(os.path.join(out_dir, "ratio_vs_scale.svg"), ss, curves_s,
          title="dressed hopping vs scattering scale", x_label="s",
          y_label="Jt/J", log_x=True)

print("dressed hopping ratio Jt/J")
for s in (0.1, 1.0, 10.0, 100.0):
    r = effective_hopping_ratio(BathModel(lambda_g=1.0, s=s))
    print(f"  lam=1, s={s:>5g}: {r:.6f}")
print(f"  saturation exp(-lam/2) at lam=1: {np.exp(-0.5):.6f}")
print(f"outputs in {out_dir}")
