#!/usr/bin/env python3
"""Writes the small MovieLens-format fixture under data/toy/.

The output is fully determined by SEED. Layout:
  items 1-240    one genre each, 30 per genre
  items 241-256  two or three genres, only ever rated late (test side)
  items 257-258  "Western", rated below 4 only; pruned together with their genre
  users 1-50     25 positive ratings each: 20 pure-genre items first, then 5 later ones
  users 51-56    fewer than 20 positives; dropped by the interaction filter
  user 99        rates items but has no users.dat row; dropped
Each active user's training mix holds at most 12 items of one genre, so a top-20 list can
reproduce it exactly from unseen items.
"""

import argparse
import pathlib
import random

SEED = 20240501
GENRES = ["Action", "Comedy", "Drama", "Horror", "Romance", "Sci-Fi", "Thriller", "Documentary"]
PER_GENRE = 30
ACTIVE = 50
TRAIN_N = 20
TEST_N = 5
CAP = 12

# Genre taste by demographic: index into GENRES -> weight.
TASTE = {
    ("M", "young"): {0: 4, 1: 3, 3: 3, 5: 4, 6: 2},
    ("M", "old"): {0: 3, 2: 3, 5: 2, 6: 3, 7: 4},
    ("F", "young"): {1: 4, 2: 3, 4: 4, 3: 1, 6: 1},
    ("F", "old"): {2: 4, 4: 3, 7: 4, 1: 1},
}
YOUNG_AGES = [1, 18, 25]
OLD_AGES = [35, 45, 50, 56]


def pure_items(genre):
    start = genre * PER_GENRE + 1
    return list(range(start, start + PER_GENRE))


def movies():
    rows = []
    for g, name in enumerate(GENRES):
        for n, item in enumerate(pure_items(g)):
            rows.append((item, f"{name} Picture {n + 1} (19{70 + n % 30})", [name]))
    rng = random.Random(SEED + 1)
    for item in range(241, 257):
        combo = rng.sample(range(len(GENRES)), rng.choice([2, 3]))
        rows.append((item, f"Crossover {item - 240} (2000)", [GENRES[c] for c in sorted(combo)]))
    rows.append((257, "Café Frontier (1962)", ["Western"]))
    rows.append((258, "Dust Road (1958)", ["Western", "Drama"]))
    return rows


def allocate(rng, taste, total):
    """Draws `total` genre slots from the taste weights, at most CAP per genre."""
    counts = {g: 0 for g in taste}
    genres = list(taste)
    weights = [taste[g] for g in genres]
    while sum(counts.values()) < total:
        g = rng.choices(genres, weights)[0]
        if counts[g] < CAP:
            counts[g] += 1
    return counts


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data" / "toy"))
    out = pathlib.Path(ap.parse_args().out)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(SEED)

    users = []
    ratings = []
    for u in range(1, ACTIVE + 1):
        gender = "F" if u % 2 == 0 else "M"
        band = "old" if (u % 4) in (0, 3) else "young"
        age = rng.choice(OLD_AGES if band == "old" else YOUNG_AGES)
        users.append((u, gender, age, rng.randint(0, 20), f"{10000 + u * 37}"))

        taste = TASTE[(gender, band)]
        counts = allocate(rng, taste, TRAIN_N)
        train = []
        for g, c in counts.items():
            train += rng.sample(pure_items(g), c)
        rng.shuffle(train)
        seen = set(train)
        fav = max(taste, key=lambda g: (taste[g], -g))
        unseen = [i for i in pure_items(fav) if i not in seen]
        test = rng.sample(unseen, 3) + rng.sample(range(241, 257), 2)

        t = 978300000 + u * 10000
        for item in train:
            t += rng.randint(1, 50)
            ratings.append((u, item, rng.choice([4, 5]), t))
        t += 1000
        for n, item in enumerate(test):
            # The first two test rows share a timestamp; the item id orders them.
            if n != 1:
                t += rng.randint(1, 50)
            ratings.append((u, item, rng.choice([4, 5]), t))
        # Noise that preprocessing removes.
        ratings.append((u, rng.choice([257, 258]), rng.choice([1, 2, 3]), t - 5000))
        if u % 5 == 0:
            # An earlier low rating of a training item: the later positive copy wins.
            ratings.append((u, train[0], 2, 978300000 + u * 10000 - 1))
        if u % 7 == 0:
            # A positive later overridden by a low rating: dropped entirely.
            extra = next(i for i in pure_items((fav + 3) % len(GENRES)) if i not in seen)
            ratings.append((u, extra, 5, t + 10))
            ratings.append((u, extra, 1, t + 20))

    for u in range(51, 57):
        gender = "F" if u % 2 == 0 else "M"
        age = rng.choice(YOUNG_AGES + OLD_AGES)
        users.append((u, gender, age, rng.randint(0, 20), f"{20000 + u}"))
        t = 979000000 + u * 1000
        for item in rng.sample(range(1, 241), rng.randint(10, 19)):
            t += rng.randint(1, 50)
            ratings.append((u, item, rng.choice([4, 5]), t))

    for item in rng.sample(range(1, 241), 25):
        ratings.append((99, item, 5, 979900000 + item))

    ratings.sort(key=lambda r: (r[0], r[3], r[1]))
    with open(out / "ratings.dat", "w", encoding="latin-1", newline="\n") as f:
        for u, i, r, t in ratings:
            f.write(f"{u}::{i}::{r}::{t}\n")
    with open(out / "movies.dat", "w", encoding="latin-1", newline="\n") as f:
        for item, title, genres in movies():
            f.write(f"{item}::{title}::{'|'.join(genres)}\n")
    with open(out / "users.dat", "w", encoding="latin-1", newline="\n") as f:
        for u, g, a, occ, z in users:
            f.write(f"{u}::{g}::{a}::{occ}::{z}\n")


if __name__ == "__main__":
    main()
