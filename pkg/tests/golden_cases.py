"""CLI invocations frozen as golden files; run this module to regenerate them."""

import io
from pathlib import Path

from evarkit.cli import main

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = FIXTURES / "golden"

CASES = {
    "eval_samples.json": ["eval", "--alpha", "0.5", "--input", "samples_01.csv", "--json"],
    "eval_indicator.json": [
        "eval", "--alpha", "0.36787944117144233", "--input", "indicator_w.csv", "--weighted", "--json",
    ],
    "eval_mixed.txt": ["eval", "--alpha", "0.3", "--input", "mixed_w.csv", "--weighted"],
    "eval_constant.json": ["eval", "--alpha", "0.3", "--input", "constant_w.csv", "--weighted", "--json"],
    "kusuoka_mixed.json": ["kusuoka", "--alpha", "0.3", "--input", "mixed_w.csv", "--weighted"],
    "verify_mixed.txt": ["verify", "--alpha", "0.3", "--input", "mixed_w.csv", "--weighted", "--witness", "0.8,0.9"],
    "lambda_curve_half.csv": ["lambda-curve", "--alpha", "0.5", "--points", "11"],
}


def resolve(argv):
    out = list(argv)
    if "--input" in out:
        i = out.index("--input") + 1
        out[i] = str(FIXTURES / out[i])
    return out


def run(argv):
    buf = io.StringIO()
    code = main(resolve(argv), out=buf)
    return code, buf.getvalue()


if __name__ == "__main__":
    GOLDEN.mkdir(exist_ok=True)
    for name, argv in CASES.items():
        code, text = run(argv)
        assert code == 0, (name, code)
        (GOLDEN / name).write_text(text)
        print("wrote", name)
