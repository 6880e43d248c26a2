import itertools
import random

import pytest

from wsnsim.energy_model import RadioParams
from wsnsim.lifetime_bound import (
    BoundInstance,
    InstanceTooLargeError,
    Schedule,
    bound_for_simulated_network,
    instance_from_text,
    instance_to_text,
    schedule_to_text,
    solve_exact,
    solve_exhaustive,
    verify_schedule,
)
from wsnsim.metrics import network_lifetime
from wsnsim.network import NORMAL, Network, NetworkConfig, Node, deploy
from wsnsim.engine import run_simulation
from wsnsim.protocols import Leach


def full_coverage(n, z, m):
    return tuple(tuple(tuple(True for _ in range(m)) for _ in range(z))
                 for _ in range(n))


def single_sensor_instance(e=0.5, budget=2.0, k_max=16):
    return BoundInstance(n_sensors=1, n_chs=1, n_ranges=1, k_max=k_max,
                         range_energies=(e,), budget=budget,
                         coverage=full_coverage(1, 1, 1))


def brute_force_bitmask(instance):
    """Plain enumeration over every boolean x tensor; tiny instances only.

    The r flags are implied: a round must be active when any sensor is on,
    and an active round must satisfy per-round constraints.
    """
    n, z, k = instance.n_sensors, instance.n_ranges, instance.k_max
    bits = n * k * z
    assert bits <= 14, "bitmask oracle limited to micro instances"
    best = 0
    for mask in range(2 ** bits):
        x = [[[bool(mask >> (i * k * z + kk * z + zz) & 1)
               for zz in range(z)] for kk in range(k)] for i in range(n)]
        # derive r: active iff any activation in the round
        r = [any(x[i][kk][zz] for i in range(n) for zz in range(z))
             for kk in range(k)]
        schedule = Schedule(x=x, r=r)
        ok, _ = verify_schedule(instance, schedule)
        if ok:
            best = max(best, sum(r))
    return best


def random_instance(rng, n_max=4, m_max=2, z_max=2, k_max=10):
    n = rng.randint(1, n_max)
    m = rng.randint(1, m_max)
    z = rng.randint(1, z_max)
    k = rng.randint(1, k_max)
    energies = tuple(round(rng.uniform(0.2, 1.5), 3) for _ in range(z))
    budget = round(rng.uniform(0.5, 3.0), 3)
    coverage = tuple(
        tuple(tuple(rng.random() < 0.7 for _ in range(m)) for _ in range(z))
        for _ in range(n))
    return BoundInstance(n_sensors=n, n_chs=m, n_ranges=z, k_max=k,
                         range_energies=energies, budget=budget,
                         coverage=coverage)


# --- verify_schedule ------------------------------------------------------

def test_all_zero_schedule_is_feasible():
    instance = single_sensor_instance()
    schedule = Schedule.empty(instance)
    ok, violations = verify_schedule(instance, schedule)
    assert ok and violations == []
    assert schedule.objective() == 0


def test_budget_violation_is_reported():
    instance = single_sensor_instance(e=0.5, budget=2.0, k_max=16)
    schedule = Schedule.empty(instance)
    for k in range(5):  # 5 * 0.5 = 2.5 > 2.0
        schedule.r[k] = True
        schedule.x[0][k][0] = True
    ok, violations = verify_schedule(instance, schedule)
    assert not ok
    assert ("1a", 0) in violations


def test_uncovered_active_round_is_reported():
    instance = BoundInstance(n_sensors=1, n_chs=1, n_ranges=1, k_max=2,
                             range_energies=(0.5,), budget=2.0,
                             coverage=full_coverage(1, 1, 1))
    schedule = Schedule.empty(instance)
    schedule.r[0] = True  # active round with nothing transmitting
    ok, violations = verify_schedule(instance, schedule)
    assert not ok
    assert ("1c", 0, 0) in violations


def test_activation_in_inactive_round_is_reported():
    instance = single_sensor_instance(k_max=2)
    schedule = Schedule.empty(instance)
    schedule.x[0][0][0] = True  # r[0] stays False
    ok, violations = verify_schedule(instance, schedule)
    assert not ok
    assert ("1b", 0, 0) in violations


def test_dimension_mismatch_raises():
    instance = single_sensor_instance(k_max=4)
    bad = Schedule(x=[[[False]] * 3], r=[False] * 4)
    with pytest.raises(ValueError):
        verify_schedule(instance, bad)


# --- solvers --------------------------------------------------------------

def test_single_sensor_budget_quotient():
    k_star, schedule = solve_exact(single_sensor_instance(e=0.5, budget=2.0))
    assert k_star == 4
    assert schedule.objective() == 4
    assert verify_schedule(single_sensor_instance(e=0.5, budget=2.0), schedule)[0]


def test_two_sensors_pool_their_budgets():
    instance = BoundInstance(n_sensors=2, n_chs=1, n_ranges=1, k_max=16,
                             range_energies=(1.0,), budget=2.0,
                             coverage=full_coverage(2, 1, 1))
    k_star, _ = solve_exact(instance)
    assert k_star == 4  # two activations each, one sensor per round suffices


def test_uncoverable_ch_means_zero_rounds():
    # the second CH column is covered by no (sensor, range) pair
    instance = BoundInstance(n_sensors=2, n_chs=2, n_ranges=2, k_max=8,
                             range_energies=(0.5, 1.0), budget=2.0,
                             coverage=(((True, False), (True, False)),
                                       ((True, False), (True, False))))
    k_star, schedule = solve_exact(instance)
    assert k_star == 0
    assert schedule.objective() == 0


def test_exhaustive_matches_bitmask_on_micro_instances():
    rng = random.Random(202)
    checked = 0
    while checked < 12:
        instance = random_instance(rng, n_max=2, m_max=2, z_max=2, k_max=3)
        if instance.n_sensors * instance.n_ranges * instance.k_max > 12:
            continue
        assert solve_exhaustive(instance) == brute_force_bitmask(instance)
        checked += 1


def test_exact_matches_exhaustive_on_random_instances():
    rng = random.Random(77)
    for _ in range(25):
        instance = random_instance(rng)
        k_exact, schedule = solve_exact(instance)
        assert k_exact == solve_exhaustive(instance)
        assert verify_schedule(instance, schedule)[0]


def test_k_star_monotone_in_budget_and_coverage():
    rng = random.Random(11)
    for _ in range(10):
        instance = random_instance(rng, n_max=3, m_max=2, z_max=2, k_max=6)
        base, _ = solve_exact(instance)
        richer = BoundInstance(
            n_sensors=instance.n_sensors, n_chs=instance.n_chs,
            n_ranges=instance.n_ranges, k_max=instance.k_max,
            range_energies=instance.range_energies,
            budget=instance.budget * 1.5, coverage=instance.coverage)
        assert solve_exact(richer)[0] >= base

        flat = [list(map(list, rows)) for rows in instance.coverage]
        i = rng.randrange(instance.n_sensors)
        z = rng.randrange(instance.n_ranges)
        j = rng.randrange(instance.n_chs)
        flat[i][z][j] = True
        wider = BoundInstance(
            n_sensors=instance.n_sensors, n_chs=instance.n_chs,
            n_ranges=instance.n_ranges, k_max=instance.k_max,
            range_energies=instance.range_energies, budget=instance.budget,
            coverage=tuple(tuple(tuple(row) for row in rows) for rows in flat))
        assert solve_exact(wider)[0] >= base


def test_solver_guards_name_the_limits():
    instance = BoundInstance(n_sensors=9, n_chs=1, n_ranges=1, k_max=4,
                             range_energies=(1.0,), budget=2.0,
                             coverage=full_coverage(9, 1, 1))
    with pytest.raises(InstanceTooLargeError, match="N <= 8"):
        solve_exact(instance)
    with pytest.raises(InstanceTooLargeError):
        solve_exhaustive(instance)


# --- serialization --------------------------------------------------------

def test_instance_text_round_trip():
    rng = random.Random(5)
    for _ in range(5):
        instance = random_instance(rng)
        assert instance_from_text(instance_to_text(instance)) == instance


def test_schedule_text_shape():
    instance = single_sensor_instance(k_max=4)
    _, schedule = solve_exact(instance)
    lines = schedule_to_text(schedule).strip().splitlines()
    assert len(lines) == 1 + instance.n_sensors * instance.k_max
    assert lines[0] == "1 1 1 1"


def test_instance_text_rejects_garbage():
    with pytest.raises(ValueError):
        instance_from_text("1 1 1\n")
    with pytest.raises(ValueError):
        instance_from_text("2 1 1 4\n0.5\n2.0\n1\n")  # missing coverage row


# --- network mapping ------------------------------------------------------

def co_located_network(n, energy, bs=(50.0, 50.0)):
    cfg = NetworkConfig(node_count=n, bs_position=bs, initial_energy=energy,
                        adv_fraction=0.0, max_rounds=100)
    nodes = [Node(id=i, position=bs, node_class=NORMAL, initial_energy=energy,
                  residual_energy=energy) for i in range(n)]
    return Network(cfg, nodes)


def test_colocated_node_bound_is_budget_quotient():
    radio = RadioParams()
    packet_floor = 4000 * radio.e_elec  # 2.0e-4 J
    net = co_located_network(1, energy=6.5 * packet_floor)
    instance = bound_for_simulated_network(net)
    assert instance.n_chs == 1
    assert all(all(all(row) for row in rows) for rows in instance.coverage)
    k_star, _ = solve_exact(instance)
    assert k_star == 6  # floor(budget / cheapest range energy)


def test_out_of_range_node_gives_zero_bound():
    cfg = NetworkConfig(node_count=1, bs_position=(0.0, 0.0), adv_fraction=0.0)
    nodes = [Node(id=0, position=(90.0, 90.0), node_class=NORMAL,
                  initial_energy=0.5, residual_energy=0.5)]
    net = Network(cfg, nodes)
    instance = bound_for_simulated_network(net, max_range=10.0)
    k_star, _ = solve_exact(instance)
    assert k_star == 0


def test_simulated_lifetime_never_exceeds_bound():
    radio = RadioParams()
    packet_floor = 4000 * radio.e_elec
    for seed in range(1, 9):
        cfg = NetworkConfig(node_count=3, initial_energy=4.1 * packet_floor,
                            adv_fraction=0.0, max_rounds=64)
        result = run_simulation(cfg, Leach(p=0.1), seed=seed)
        assert not result.censored
        lifetime = network_lifetime(result.trace, 3)
        instance = bound_for_simulated_network(deploy(cfg, seed))
        k_star, _ = solve_exact(instance)
        assert lifetime <= k_star


def test_bound_guard_for_large_networks():
    cfg = NetworkConfig(node_count=9)
    with pytest.raises(InstanceTooLargeError):
        bound_for_simulated_network(deploy(cfg, 1))
