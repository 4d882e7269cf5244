#!/usr/bin/env python3

import sys
from pathlib import Path

import requests

BASE_URL = "https://archive.ics.uci.edu/ml/machine-learning-databases"

DATASETS = {
    "wine-red": "wine-quality/winequality-red.csv",
    "wine-white": "wine-quality/winequality-white.csv",
}


def fetch(name: str, directory: Path) -> Path:
    target = directory / Path(DATASETS[name]).name
    if target.exists():
        print(f"{target} already present")
        return target
    response = requests.get(f"{BASE_URL}/{DATASETS[name]}", timeout=60)
    response.raise_for_status()
    directory.mkdir(parents=True, exist_ok=True)
    target.write_bytes(response.content)
    print(f"Saved {target} ({len(response.content)} bytes)")
    return target


if len(sys.argv) < 2 or sys.argv[1] not in DATASETS:
    print(f"usage: fetch_uci.py {{{','.join(DATASETS)}}} [directory]")
    sys.exit(1)

fetch(sys.argv[1], Path(sys.argv[2] if len(sys.argv) > 2 else "data"))
