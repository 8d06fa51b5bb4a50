import pytest

from innoboard.stamps import (
    MAX_LAMPORT,
    ClockOverflowError,
    LamportClock,
    Stamp,
    merge_field,
)


def test_total_order_lamport_first():
    assert Stamp(2, "a") > Stamp(1, "z")
    assert Stamp(1, "b") > Stamp(1, "a")
    assert Stamp(1, "a") == Stamp(1, "a")


def test_tick_advances_past_observed():
    clock = LamportClock("a", counter=5)
    assert clock.tick(Stamp(9, "b")) == Stamp(10, "a")


def test_tick_without_observation():
    clock = LamportClock("a", counter=5)
    assert clock.tick() == Stamp(6, "a")


def test_consecutive_ticks_strictly_increase():
    clock = LamportClock("a")
    first = clock.tick()
    second = clock.tick()
    assert second > first


def test_tick_overflow_is_fatal():
    clock = LamportClock("a", counter=MAX_LAMPORT)
    with pytest.raises(ClockOverflowError):
        clock.tick()


def test_merge_tie_breaks_on_client():
    assert merge_field(Stamp(5, "a"), Stamp(5, "b")) is True


def test_merge_keeps_newer_current():
    assert merge_field(Stamp(7, "z"), Stamp(6, "z")) is False


def test_merge_replay_of_winner_is_noop():
    assert merge_field(Stamp(5, "b"), Stamp(5, "b")) is False


def test_merge_commutes_over_stamp_grid():
    # Exhaustive check: both arrival orders elect the same winner.
    grid = [Stamp(n, c) for n in range(5) for c in ("a", "b", "c")]
    for current in grid:
        for incoming in grid:
            one = incoming if merge_field(current, incoming) else current
            other = current if merge_field(incoming, current) else incoming
            assert one == other


def test_stamp_json_round_trip():
    stamp = Stamp(42, "client-x")
    assert Stamp.from_json(stamp.as_json()) == stamp
    assert stamp.key() == "42.client-x"
