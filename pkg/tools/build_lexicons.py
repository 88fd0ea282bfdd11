"""Regenerate the frequency and age-of-acquisition word lists.

Needs the ``wordfreq`` package (not a runtime dependency):

    pip install --target /tmp/wf wordfreq
    PYTHONPATH=/tmp/wf python3 tools/build_lexicons.py

The AoA file is a proxy: rarer and longer words get later ages. Values are
``20 - 2.2 * zipf + 0.6 * (syllables - 1)`` clipped to [2, 18] years.
"""
import re
from pathlib import Path

from wordfreq import top_n_list, zipf_frequency

from paracontrol.attrs.text import count_syllables

DATA = Path(__file__).resolve().parents[1] / "src" / "paracontrol" / "attrs" / "data"
WORD = re.compile(r"^[a-z]+(?:'[a-z]+)*$")


def main():
    ranked = [w for w in top_n_list("en", 40000) if WORD.match(w)]
    top = ranked[:2000]
    (DATA / "freq_top2000.txt").write_text(
        "# 2000 most frequent English words (wordfreq 'en' ranking)\n" + "\n".join(top) + "\n")
    lines = ["# word<TAB>approximate age of acquisition in years (frequency/length proxy)"]
    for w in ranked[:20000]:
        aoa = 20.0 - 2.2 * zipf_frequency(w, "en") + 0.6 * (count_syllables(w) - 1)
        lines.append(f"{w}\t{min(max(aoa, 2.0), 18.0):.2f}")
    (DATA / "aoa.txt").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
