"""Rebuild data/uci/*.csv from datasets bundled inside PyPI distributions.

Sources (download with ``pip download --no-deps <name>``):

* keel-ds 0.2.5 wheel: iris, wine, pima, tae (Teaching), and the KEEL binary
  splits of yeast from which the 10-class labels are recovered
* pydataset 0.2.0 sdist: MASS ``fgl`` (Glass; RI stored as (RI - 1.518) * 1e3)
* Orange3 wheel: ``zoo.tab``

Usage: python scripts/rebuild_uci_data.py KEEL_WHEEL PYDATASET_SDIST ORANGE_WHEEL
"""
import csv
import io
import sys
import tarfile
import zipfile
from collections import Counter
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "data" / "uci"


def write(name, header, rows):
    OUT.mkdir(parents=True, exist_ok=True)
    with open(OUT / f"{name}.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    print(name, len(rows), "rows", dict(Counter(r[-1] for r in rows)))


def keel_rows(zf, path):
    text = zf.read(path).decode()
    return [[c.strip() for c in line.split(",")] for line in text.splitlines() if line.strip()]


def num(s):
    return repr(float(s)) if "." in s or "e" in s.lower() else s


def build_yeast(zf):
    base = "keel_ds/data/imbalanced/raw/"
    full = keel_rows(zf, base + "yeast1.dat")
    key = lambda r: tuple(round(float(v), 4) for v in r[:8])
    # yeast-1_vs_7 omits the pox column (constant inside that subset)
    key7 = lambda k: k[:5] + k[6:]

    def split(name, side):
        rows = keel_rows(zf, base + name)
        return Counter(tuple(round(float(v), 4) for v in r[:-1]) for r in rows if r[-1] == side)

    # class sets solved from the split sizes: 1=NUC 2=CYT 3=ME1 4=ME2 6=EXC 7=VAC 8=POX 9=ERL
    nuc = split("yeast1.dat", "positive")
    me3 = split("yeast3.dat", "positive")
    me2 = split("yeast4.dat", "positive")
    me1 = split("yeast5.dat", "positive")
    exc = split("yeast6.dat", "positive")
    vac7 = split("yeast-1_vs_7.dat", "positive")
    pox = split("yeast-2_vs_8.dat", "positive")
    g3789 = split("yeast-0-2-5-6_vs_3-7-8-9.dat", "positive")
    g05679 = split("yeast-0-5-6-7-9_vs_4.dat", "negative")
    vac = Counter()
    for r in full:
        k = key(r)
        if vac7[key7(k)] > vac[k] and k in g3789:
            vac[k] += 1
    erl = g3789 - me1 - vac - pox
    mit = g05679 - me3 - exc - vac - erl
    pool = {"NUC": nuc, "ME3": me3, "ME2": me2, "ME1": me1, "EXC": exc,
            "VAC": vac, "POX": pox, "ERL": erl, "MIT": mit}
    pool = {lab: Counter(c) for lab, c in pool.items()}
    rows = []
    for r in full:
        k = key(r)
        for lab, c in pool.items():
            if c[k] > 0:
                c[k] -= 1
                rows.append(r[:8] + [lab])
                break
        else:
            rows.append(r[:8] + ["CYT"])
    left = {lab: sum(c.values()) for lab, c in pool.items()}
    assert not any(left.values()), left
    header = ["mcg", "gvh", "alm", "mit", "erl", "pox", "vac", "nuc", "class"]
    write("yeast", header, rows)


def main(keel_whl, pyds_sdist, orange_whl):
    zf = zipfile.ZipFile(keel_whl)
    bal = "keel_ds/data/balanced/raw/"
    write("iris", ["sepal_length", "sepal_width", "petal_length", "petal_width", "class"],
          keel_rows(zf, bal + "iris.dat"))
    write("wine", ["alcohol", "malic_acid", "ash", "alcalinity", "magnesium", "phenols",
                   "flavanoids", "nonflavanoid_phenols", "proanthocyanins", "color_intensity",
                   "hue", "od280_od315", "proline", "class"],
          [[num(c) for c in r[:-1]] + [r[-1]] for r in keel_rows(zf, bal + "wine.dat")])
    write("pima", ["pregnancies", "glucose", "blood_pressure", "skin", "insulin", "bmi",
                   "pedigree", "age", "class"], keel_rows(zf, bal + "pima.dat"))
    write("teaching", ["native_english", "instructor", "course", "semester", "class_size",
                       "class"], keel_rows(zf, bal + "tae.dat"))
    build_yeast(zf)

    with tarfile.open(pyds_sdist) as outer:
        member = next(m for m in outer.getmembers() if m.name.endswith("resources.tar.gz"))
        inner = tarfile.open(fileobj=io.BytesIO(outer.extractfile(member).read()))
        fgl = inner.extractfile("resources/rdata/csv/MASS/fgl.csv").read().decode()
    rows = []
    for rec in list(csv.reader(io.StringIO(fgl)))[1:]:
        ri = round(1.518 + float(rec[1]) / 1e3, 5)
        rows.append([repr(ri)] + rec[2:10] + [rec[10]])
    write("glass", ["RI", "Na", "Mg", "Al", "Si", "K", "Ca", "Ba", "Fe", "type"], rows)

    oz = zipfile.ZipFile(orange_whl)
    lines = oz.read("Orange/datasets/zoo.tab").decode().splitlines()
    header = lines[0].split("\t")[1:]
    rows = [line.split("\t")[1:] for line in lines[3:] if line.strip()]
    write("zoo", header, rows)


if __name__ == "__main__":
    main(*sys.argv[1:4])
