"""Recomputes the golden bulletin from its share files with hashlib alone."""
import hashlib
import json
import math
import pathlib
import sys

GOLDEN = pathlib.Path(__file__).resolve().parent.parent / "crates/core/tests/data/golden"


def width(cap):
    return math.ceil(math.log2(cap)) + 1


def h(data, q):
    return hashlib.sha256(data).digest()[: q // 8]


def encode(x, i, l, j, m):
    bits = len(x) * 8 + l + m
    value = (int.from_bytes(x, "big") << (l + m)) | (i << m) | j
    pad = (-bits) % 8
    return (value << pad).to_bytes((bits + pad) // 8, "big")


def main():
    bulletin = json.loads((GOLDEN / "bulletin.json").read_text())
    params = bulletin["params"]
    q = params["q"]
    l, m = width(params["k_max"]), width(params["t_max"])
    assert (l, m) == (params["l"], params["m"])
    shares = {}
    for path in GOLDEN.glob("share-*.json"):
        record = json.loads(path.read_text())
        shares[record["participant"]] = bytes.fromhex(record["x"])
    secrets = [bytes.fromhex(line) for line in (GOLDEN / "secrets.txt").read_text().split()]

    publics, table, commitments = [], [], []
    for structure in json.loads((GOLDEN / "structures.json").read_text()):
        i = structure["secret_index"]
        s = secrets[i - 1]
        commitments.append({"secret_index": i, "digest": h(s, q).hex()})
        for j, members in enumerate(structure["qualified_sets"], start=1):
            acc = int.from_bytes(s, "big")
            for a in sorted(members):
                p = h(encode(shares[a], i, l, j, m), q)
                acc ^= int.from_bytes(p, "big")
                table.append({"participant": a, "secret_index": i, "set_position": j,
                              "digest": h(p, q).hex()})
            publics.append({"secret_index": i, "set_position": j,
                            "value": acc.to_bytes(q // 8, "big").hex()})
    table.sort(key=lambda e: (e["secret_index"], e["set_position"], e["participant"]))

    ok = (publics == bulletin["public_shares"]
          and commitments == bulletin["commitments"]
          and table == bulletin["verification_table"])
    print("golden bulletin matches hashlib recomputation" if ok else "MISMATCH")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
