"""Print the imperfect qubit erasure model: Bloch map, effects, Kraus operators, scalars."""
import argparse
import math

import numpy as np

from condaction import spinmodel as sm
from condaction.entropy import von_neumann_entropy
from condaction.instruments import effects_of, total_operation


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-bath", type=int, default=6)
    ap.add_argument("--time", type=float, default=2 * math.pi)
    args = ap.parse_args()
    cfg = sm.SpinBathConfig(n_bath=args.n_bath, t=args.time)
    np.set_printoptions(precision=6, suppress=True)

    ins = sm.erasure_instrument(cfg)
    bmap = sm.bloch_affine_map(total_operation(ins))
    print("Bloch matrix (x7):\n", bmap.matrix * 7)
    for n, f in zip(ins.outcomes, effects_of(ins).effects):
        print(f"F{n} diagonal:", np.diag(f).real)
    mk = sm.minimal_kraus(ins)
    print("Kraus counts from dilation:", ins.kraus_counts(), " minimal:", mk.kraus_counts())
    for n in mk.outcomes:
        for k in mk[n].kraus:
            print(f"outcome {n}:\n", k)
    lm = sm.ellipsoid_landmarks(bmap)
    print("semi-axes:", lm.semi_axes)
    print("bath entropy:", von_neumann_entropy(sm.erasure_dilation(cfg).sigma), "log 14 =", math.log(14))
    half, end = sm.entropy_curve(cfg, [0.5, 1.0])
    print(f"S1 at p=1/2: {half.S1:.6f}   S1+S2 at p=1: {end.S1 + end.S2:.6f}")
    print(f"entropy-preserving p: {sm.find_p1(cfg):.8f}")


if __name__ == "__main__":
    main()
