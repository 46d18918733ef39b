#!/usr/bin/env python3
"""Regenerate the bundled synthetic flight-domain mini-corpus.

Writes three files under data/:
  mini_corpus.txt   one utterance per line (plain format)
  mini_corpus.tsv   token<TAB>tag lines, blank-line separated, #intent line per block
  lexicon.tsv       phrase<TAB>placeholder delexicalization lexicon

Output is fully determined by SEED; rerunning reproduces the committed files.
"""

import random
from pathlib import Path

SEED = 7
COUNT = 120

CITIES = ["Boston", "Denver", "Pittsburgh", "Dallas", "Atlanta", "San Francisco",
          "New York", "Salt Lake City", "Washington", "Baltimore"]
AIRLINES = ["UA", "DL", "AA", "US", "CO"]
FARE_CODES = ["QX", "QW", "Y", "F", "H"]
AIRCRAFT = ["F28", "DC10", "737", "M80"]
DAYS = ["Monday", "Tuesday", "Friday", "Sunday"]

LEXICON = (
    [(c.lower(), "city-name") for c in CITIES]
    + [(a.lower(), "code") for a in AIRLINES + FARE_CODES + AIRCRAFT]
    + [(d.lower(), "day-name") for d in DAYS]
)


def slot(words, tag):
    toks = words.split()
    return [(t, ("B-" if i == 0 else "I-") + tag) for i, t in enumerate(toks)]


def plain(words):
    return [(t, "O") for t in words.split()]


def flights_show(rng):
    a, b = rng.sample(CITIES, 2)
    return "flight", plain("Show me the flights from") + slot(a, "fromloc.city_name") + \
        plain("to") + slot(b, "toloc.city_name")


def flights_show_day(rng):
    a, b = rng.sample(CITIES, 2)
    return "flight", plain("show me flights from") + slot(a, "fromloc.city_name") + \
        plain("to") + slot(b, "toloc.city_name") + plain("on") + \
        slot(rng.choice(DAYS), "depart_date.day_name")


def flights_list(rng):
    a, b = rng.sample(CITIES, 2)
    return "flight", plain("List all flights from") + slot(a, "fromloc.city_name") + \
        plain("to") + slot(b, "toloc.city_name")


def flights_want(rng):
    a, b = rng.sample(CITIES, 2)
    return "flight", plain("i want to fly from") + slot(a, "fromloc.city_name") + \
        plain("to") + slot(b, "toloc.city_name")


def flights_short(rng):
    return "flight", plain("show me flights")


def abbrev_code(rng):
    return "abbreviation", plain("What is") + slot(rng.choice(AIRLINES), "airline_code")


def abbrev_fare(rng):
    return "abbreviation", plain("what is fare code") + slot(rng.choice(FARE_CODES), "fare_basis_code")


def abbrev_mean(rng):
    return "abbreviation", plain("what does") + slot(rng.choice(FARE_CODES), "fare_basis_code") + \
        plain("mean")


def ground(rng):
    return "ground_service", plain("what ground transportation is available in") + \
        slot(rng.choice(CITIES), "city_name")


def fare(rng):
    a, b = rng.sample(CITIES, 2)
    return "airfare", plain("show me the cheapest fare from") + slot(a, "fromloc.city_name") + \
        plain("to") + slot(b, "toloc.city_name")


def round_trip(rng):
    a, b = rng.sample(CITIES, 2)
    return "airfare", plain("how much is a round trip ticket from") + \
        slot(a, "fromloc.city_name") + plain("to") + slot(b, "toloc.city_name")


def airline(rng):
    a, b = rng.sample(CITIES, 2)
    return "airline", plain("which airlines fly from") + slot(a, "fromloc.city_name") + \
        plain("to") + slot(b, "toloc.city_name")


def capacity(rng):
    return "capacity", plain("what is the capacity of a") + slot(rng.choice(AIRCRAFT), "aircraft_code")


TEMPLATES = [
    (flights_show, 14), (flights_show_day, 10), (flights_list, 10), (flights_want, 8),
    (flights_short, 6), (abbrev_code, 12), (abbrev_fare, 8), (abbrev_mean, 6),
    (ground, 10), (fare, 10), (round_trip, 8), (airline, 10), (capacity, 8),
]


def main():
    rng = random.Random(SEED)
    items = []
    for fn, n in TEMPLATES:
        for _ in range(n):
            items.append(fn(rng))
    assert len(items) == COUNT
    rng.shuffle(items)

    out = Path(__file__).resolve().parent.parent / "data"
    out.mkdir(exist_ok=True)
    with open(out / "mini_corpus.txt", "w", newline="\n") as f:
        for _, pairs in items:
            f.write(" ".join(t for t, _ in pairs) + "\n")
    with open(out / "mini_corpus.tsv", "w", newline="\n") as f:
        for i, (intent, pairs) in enumerate(items):
            if i:
                f.write("\n")
            for t, tag in pairs:
                f.write(f"{t}\t{tag}\n")
            f.write(f"#intent\t{intent}\n")
    with open(out / "lexicon.tsv", "w", newline="\n") as f:
        for phrase, placeholder in LEXICON:
            f.write(f"{phrase}\t{placeholder}\n")


if __name__ == "__main__":
    main()
