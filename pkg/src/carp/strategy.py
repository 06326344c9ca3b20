"""Rule-based blackjack basic-strategy recommender.

Hands are lists of normalized ranks ("2"-"10" and "A"; face cards are
collapsed onto "10" before they get here).  The recommender walks the
rule set in a fixed order: blackjack win, pair advice, soft totals, hard
totals.  A few of its pair rules intentionally differ from conventional
basic-strategy charts (5/5 and 10/10 pairs answer "Don't split." with no
further advice); they are reproduced as designed, not corrected.

Bust hands (hard total over 21) fall into the stand branch; callers that
care must check the total themselves.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import InvalidHandError, NotARankError, UpcardNotVisibleError

RANKS = ("2", "3", "4", "5", "6", "7", "8", "9", "10", "A")

_FACE_CARDS = {"J": "10", "Q": "10", "K": "10"}


class Move(Enum):
    HIT = "Hit."
    STAND = "Stand."
    DOUBLE = "Double."
    SPLIT = "Split."
    DONT_SPLIT = "Don't split."
    DOUBLE_DOWN_SPLIT_ELSE_HIT = "Double Down Split. If not possible, then hit."
    BLACKJACK_WIN = "Blackjack, you win!"

    @property
    def display(self) -> str:
        return self.value

    @property
    def slug(self) -> str:
        return self.name.lower()


_SLUG_TO_MOVE = {m.slug: m for m in Move}


def move_from_slug(slug: str) -> Move:
    try:
        return _SLUG_TO_MOVE[slug]
    except KeyError:
        raise ValueError(f"unknown move {slug!r}") from None


def normalize_rank(raw: str) -> str:
    """Collapse face cards onto "10"; BACK has no rank."""
    if raw == "BACK":
        raise NotARankError("a face-down card has no rank")
    rank = _FACE_CARDS.get(raw, raw)
    if rank not in RANKS:
        raise NotARankError(f"{raw!r} is not a card rank")
    return rank


def _canonical(cards) -> tuple[str, ...]:
    # Aces first, then numeric ranks descending, so soft-total logic can
    # key off the first card.
    return tuple(sorted(cards, key=lambda r: (0, 0) if r == "A" else (1, -int(r))))


@dataclass(frozen=True, init=False)
class Hand:
    """Player hand in canonical order (aces first, then descending)."""

    cards: tuple[str, ...]

    def __init__(self, cards) -> None:
        cards = tuple(cards)
        if not cards:
            raise InvalidHandError("hand must contain at least one card")
        for c in cards:
            if c not in RANKS:
                raise NotARankError(f"{c!r} is not a card rank")
        object.__setattr__(self, "cards", _canonical(cards))

    def __len__(self) -> int:
        return len(self.cards)


def calculate_hand_total(hand: Hand) -> int:
    """Hard-adjusted total: aces count 11, dropping to 1 while the hand busts.

    May still exceed 21 when no soft aces remain; that is the bust value.
    """
    total = 0
    aces = 0
    for card in hand.cards:
        if card == "A":
            aces += 1
            total += 11
        else:
            total += int(card)
    while total > 21 and aces > 0:
        total -= 10
        aces -= 1
    return total


def _pair_move(card: str, dealer: str) -> Move:
    move = Move.DONT_SPLIT
    if card in ("A", "8"):
        move = Move.SPLIT
    elif card in ("5", "10"):
        move = Move.DONT_SPLIT
    elif 2 <= int(card) <= 7:
        if dealer in ("8", "9", "10", "A"):
            move = Move.DONT_SPLIT
        elif card in ("2", "3", "7") and 2 <= int(dealer) <= 7:
            move = Move.SPLIT
        if card in ("2", "3") and dealer in ("2", "3"):
            move = Move.DOUBLE_DOWN_SPLIT_ELSE_HIT
        if card == "6":
            if dealer != "A" and 3 <= int(dealer) <= 6:
                move = Move.SPLIT
            elif dealer == "2":
                move = Move.DOUBLE_DOWN_SPLIT_ELSE_HIT
        if card == "4":
            if dealer in ("5", "6"):
                move = Move.DOUBLE_DOWN_SPLIT_ELSE_HIT
    else:  # pair of nines
        if dealer not in ("7", "10", "A"):
            move = Move.SPLIT
    return move


def _soft_move(second: str, dealer: str) -> Move:
    move = Move.HIT
    if second in ("8", "9"):
        if second == "8" and dealer == "6":
            move = Move.DOUBLE
        else:
            move = Move.STAND
    elif second == "7":
        if dealer != "A" and 2 <= int(dealer) <= 6:
            move = Move.DOUBLE
        elif dealer != "A" and 7 <= int(dealer) <= 8:
            move = Move.STAND
    else:
        if dealer in ("5", "6"):
            move = Move.DOUBLE
        elif dealer == "4" and second in ("4", "5", "6"):
            move = Move.DOUBLE
        elif dealer == "3" and second == "6":
            move = Move.DOUBLE
    return move


def _hard_move(total: int, dealer: str) -> Move:
    move = Move.HIT
    digit = dealer != "A"
    if total >= 17:
        move = Move.STAND
    elif 13 <= total <= 16 and digit and 2 <= int(dealer) <= 6:
        move = Move.STAND
    elif total == 12 and digit and 4 <= int(dealer) <= 6:
        move = Move.STAND
    elif total == 11:
        move = Move.DOUBLE
    elif total == 10 and digit and 2 <= int(dealer) <= 9:
        move = Move.DOUBLE
    elif total == 9 and digit and 3 <= int(dealer) <= 6:
        move = Move.DOUBLE
    return move


def recommend(player: Hand, dealer_upcard: str) -> Move:
    """Optimal move for the player's hand against the dealer upcard.

    Branch order: blackjack win, pairs, two-card soft totals, hard
    totals.  Pair and soft logic only apply to two-card hands; longer
    hands always route through the ace-adjusted hard total.
    """
    if dealer_upcard not in RANKS:
        raise NotARankError(f"{dealer_upcard!r} is not a card rank")
    if len(player) < 2:
        raise InvalidHandError("player hand has fewer than two cards")
    cards = player.cards

    if cards == ("A", "10"):
        return Move.BLACKJACK_WIN
    if len(cards) == 2 and cards[0] == cards[1]:
        return _pair_move(cards[0], dealer_upcard)
    if len(cards) == 2 and cards[0] == "A":
        return _soft_move(cards[1], dealer_upcard)
    return _hard_move(calculate_hand_total(player), dealer_upcard)


# ---------------------------------------------------------------------------
# Table-role assignment

# Centroids closer together than this fraction of the image height are
# treated as a single row of cards.
SINGLE_ROW_FRACTION = 0.05


def assign_roles(
    centroid_ys,
    image_height: int,
    split_fraction: float | None = None,
) -> tuple[list[int], list[int]]:
    """Partition detections into (player, dealer) index lists by height.

    Default: 1-D 2-means on centroid y; the group nearer the top of the
    image is the dealer.  If every centroid sits within 5% of the image
    height, everything is the player's.  A configured split_fraction
    overrides clustering: centroids above split_fraction * height are
    dealer cards.
    """
    ys = [float(y) for y in centroid_ys]
    if not ys:
        return [], []
    idx = list(range(len(ys)))

    if split_fraction is not None:
        cut = split_fraction * image_height
        dealer = [i for i in idx if ys[i] < cut]
        player = [i for i in idx if ys[i] >= cut]
        return player, dealer

    if max(ys) - min(ys) < SINGLE_ROW_FRACTION * image_height:
        return idx, []

    lo, hi = min(ys), max(ys)
    assign = None
    for _ in range(100):
        new_assign = [0 if abs(y - lo) <= abs(y - hi) else 1 for y in ys]
        if new_assign == assign:
            break
        assign = new_assign
        lo_ys = [y for y, a in zip(ys, assign) if a == 0]
        hi_ys = [y for y, a in zip(ys, assign) if a == 1]
        if not lo_ys or not hi_ys:
            return idx, []
        lo, hi = sum(lo_ys) / len(lo_ys), sum(hi_ys) / len(hi_ys)
    dealer = [i for i in idx if assign[i] == 0]
    player = [i for i in idx if assign[i] == 1]
    return player, dealer


def dealer_upcard(dealer_cards) -> str:
    """First face-up dealer label, normalized; BACK (the hole card) is skipped."""
    for label in dealer_cards:
        if label != "BACK":
            return normalize_rank(label)
    raise UpcardNotVisibleError("every dealer card is face down")
