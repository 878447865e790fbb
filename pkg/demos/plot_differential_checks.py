"""
Checking the differential response of a keyed cipher
====================================================

For the attack to work the map from plaintext differences to ciphertext
differences must not depend on the plaintext, and must be bijective, additive
and homogeneous modulo G.  On tiny instances (3 pixels, G = 4) every case can
be enumerated.
"""

from modattack import preset
from modattack.bam import bam_suite
from modattack.keyschedule import derive_round_material, make_stream

for name in ("zhou", "lan", "filtering_border", "xor_control"):
    spec = preset(name, modulus=4)
    # border presets are probed on their framed working image
    material = derive_round_material(make_stream("0123"), spec.rounds, 3, 4)
    print(name)
    for v in bam_suite(spec, material, (1, 3), trials=200):
        print(f"   {v.check:<18} {str(v.passed):<5} {v.mode:<10} cases={v.cases}")
        if v.counterexample and v.check == "additivity":
            print("   counterexample:", v.counterexample)
