"""Residue coding walkthrough: encoding, redundancy, and error correction.

A payload integer m below M (the product of the k smallest moduli) is stored
as its residues against n pairwise-coprime moduli.  The n - k extra residues
buy a minimum Hamming distance of n - k + 1, so one wrong residue is always
correctable and a likelihood table usually rescues two.
"""

import numpy as np

from glyphcode import (
    ModuliSet,
    crt_reconstruct,
    encode_phi,
    hamming_decode,
    min_distance,
    ml_decode,
)

moduli = ModuliSet((2, 3, 5, 7, 11), k=3)
print(f"moduli {moduli.p}, payload bound M = {moduli.payload_bound}")
print(f"brute-forced minimum distance: {min_distance(moduli)} (= n - k + 1)")

m = 23
codeword = encode_phi(m, moduli)
print(f"\nencode m = {m} -> residues {codeword}")
print(f"reconstruct via CRT -> {crt_reconstruct(codeword, moduli)}")

# one corrupted residue: plain Hamming decoding recovers it
received = list(codeword)
received[4] = 9
outcome = hamming_decode(received, moduli)
print(f"\none error   {tuple(received)} -> {outcome.as_text()}")

# two corrupted residues: Hamming decoding alone is ambiguous
received = list(codeword)
received[3] = 1
received[4] = 9
outcome = hamming_decode(received, moduli)
print(f"two errors  {tuple(received)} -> {outcome.as_text()}")

# a per-position likelihood table breaks the tie: each row says how plausible
# every glyph index is for that letter, given what the recognizer saw
rng = np.random.default_rng(0)
rows = []
for j, p in enumerate(moduli.p):
    row = np.ones(p) + rng.uniform(0, 0.1, p)
    row[codeword[j]] += 2.0  # the true glyph still looks most plausible
    rows.append(row / row.sum())
outcome = ml_decode(received, moduli, g=rows)
print(f"with table  {tuple(received)} -> {outcome.as_text()}")
print(f"\nrecovered m = {outcome.m} (true m = {m})")
