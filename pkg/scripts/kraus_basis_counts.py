"""How many Kraus operators the erasure dilation yields for different bases.

The channel is the same for every choice; only the count of
non-vanishing operators changes.
"""
import numpy as np

from condaction import spinmodel as sm
from condaction.dilation import instrument_from_dilation
from condaction.instruments import instruments_equal


def main():
    cfg = sm.SpinBathConfig()
    d = sm.erasure_dilation(cfg)
    ref = sm.erasure_instrument(cfg)
    print("default eigenbases:", ref.kraus_counts())

    w = sm.spin_multiplet_basis(cfg.n_bath, cfg.J, cfg.B)
    in_ground = np.einsum("ki,kl,li->i", w.conj(), d.Q.projections[0], w).real > 0.5
    bases = [w[:, in_ground], w[:, ~in_ground]]
    ins = instrument_from_dilation(d, sigma_vectors=bases[0], q_bases=bases)
    print("(S^2, S^z) multiplet basis:", ins.kraus_counts(), "same channel:", instruments_equal(ins, ref))

    rng = np.random.default_rng(1)
    for _ in range(3):
        rot = instrument_from_dilation(d, **sm.rotated_ground_bases(cfg, rng))
        print("random rotation:", rot.kraus_counts(), "same channel:", instruments_equal(rot, ref))


if __name__ == "__main__":
    main()
