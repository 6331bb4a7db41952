"""Elo ratings with an immovable anchor player."""

from __future__ import annotations


class EloTable:
    """Standard logistic Elo. The optional anchor player's rating is frozen at
    the initial value so all other ratings are interpretable against a fixed
    reference; opponents of the anchor still update normally."""

    def __init__(self, k: float = 32.0, init: float = 1000.0,
                 anchor: str | None = None):
        self.k = float(k)
        self.init = float(init)
        self.anchor = anchor
        self.ratings: dict[str, float] = {}
        self.games: dict[str, int] = {}
        if anchor is not None:
            self.ratings[anchor] = self.init

    def rate(self, name: str) -> float:
        return self.ratings.get(name, self.init)

    def expected(self, a: str, b: str) -> float:
        """P(a beats b) implied by current ratings."""
        return 1.0 / (1.0 + 10.0 ** ((self.rate(b) - self.rate(a)) / 400.0))

    def record(self, a: str, b: str, score_a: float) -> None:
        """score_a: 1 win, 0 loss, 0.5 draw, from a's perspective."""
        if not 0.0 <= score_a <= 1.0:
            raise ValueError("score must be in [0, 1]")
        ea = self.expected(a, b)
        ra, rb = self.rate(a), self.rate(b)
        if a != self.anchor:
            self.ratings[a] = ra + self.k * (score_a - ea)
        if b != self.anchor:
            self.ratings[b] = rb + self.k * ((1.0 - score_a) - (1.0 - ea))
        self.games[a] = self.games.get(a, 0) + 1
        self.games[b] = self.games.get(b, 0) + 1

    def table(self) -> list[tuple[str, float, int]]:
        rows = [(n, r, self.games.get(n, 0)) for n, r in self.ratings.items()]
        return sorted(rows, key=lambda t: -t[1])
