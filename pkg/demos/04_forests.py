"""Accepting runs as leaf-data forests.

A run of an SVAS becomes a forest: each push/pop pair is an internal node
around the events in between, every other command is a leaf, and an
increment shares its data value with the decrement that cancels it. A
two-variable sentence describes exactly these forests. Here we encode one
run, evaluate the sentence, then break the forest in small ways and compare
the sentence with a direct decoder.
"""

from svasreach.corpus import svas_programs
from svasreach.execution import enumerate_witnesses, replay
from svasreach.logic import (
    DecodeError,
    data_matching_valid,
    decode_forest,
    emit_formula,
    encode_trace,
    evaluate,
    mutate_forest_described,
)
from svasreach.logic.encoding import alphabet
from svasreach.logic.formula import size
from svasreach.svas import serialize_svas

p = svas_programs()["nested"]
print(serialize_svas(p))
print()
witness = list(enumerate_witnesses(p, 10))[3]
t = replay(p, witness)
forest = encode_trace(p, t)
phi = emit_formula(p)
print(f"run {t.command_indices} encodes as:")
print(forest.to_text())
print(f"sentence size {size(phi)} nodes; satisfied: {evaluate(phi, forest)}")
print()

print("seeded edits:")
for seed in range(8):
    f, kind, what = mutate_forest_described(forest, seed, alphabet(p).letters)
    try:
        decoded = decode_forest(p, f)
        verdict = decoded.outcome.value if decoded.accepted else f"{decoded.outcome.value}/{decoded.reason}"
    except DecodeError as exc:
        verdict = f"undecodable ({exc})"
    data = "valid" if data_matching_valid(p, f) else "invalid"
    print(f"  {what:34s} sentence={str(evaluate(phi, f)):5s} decoder={verdict}, data {data}")
