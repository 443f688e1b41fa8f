import pytest

from midint.prime_field import FieldSpec, PRIME_FIELD_32, PRIME_FIELD_64, \
    FIELD_SPECS, pf_add, pf_sub, pf_mul, pf_pow, pf_inv, is_prime, \
    verify_spec, find_ntt_prime, omega_table, dump_field_specs, \
    load_field_specs


P32 = PRIME_FIELD_32.p
P64 = PRIME_FIELD_64.p


################################################################################
# FIELD OPS
################################################################################

def test_field_examples():
    assert pf_add(P32 - 1, 1, PRIME_FIELD_32) == 0
    assert pf_sub(0, 1, PRIME_FIELD_32) == P32 - 1
    assert pf_mul(P32 - 1, P32 - 1, PRIME_FIELD_32) == 1
    assert pf_add(P64 - 1, P64 - 1, PRIME_FIELD_64) == P64 - 2


@pytest.mark.parametrize('spec', [PRIME_FIELD_32, PRIME_FIELD_64])
def test_field_axioms(rng, spec):
    for _ in range(10000):
        x, y, z = (int(v) for v in rng.integers(0, spec.p, size=3))
        assert pf_add(x, y, spec) == pf_add(y, x, spec)
        assert pf_mul(x, y, spec) == pf_mul(y, x, spec)
        assert pf_mul(x, pf_add(y, z, spec), spec) == \
            pf_add(pf_mul(x, y, spec), pf_mul(x, z, spec), spec)
        assert pf_sub(pf_add(x, y, spec), y, spec) == x
        assert 0 <= pf_sub(x, y, spec) < spec.p


def test_generator_order():
    assert pf_pow(13, 1 << 30, PRIME_FIELD_32) == 1
    assert pf_pow(13, 1 << 29, PRIME_FIELD_32) == P32 - 1
    assert pf_pow(21, 1 << 57, PRIME_FIELD_64) == 1
    assert pf_pow(21, 1 << 56, PRIME_FIELD_64) == P64 - 1


def test_pow_edge_cases():
    assert pf_pow(0, 0, PRIME_FIELD_32) == 1
    assert pf_pow(5, 1, PRIME_FIELD_32) == 5
    with pytest.raises(ValueError):
        pf_pow(5, -1, PRIME_FIELD_32)


@pytest.mark.parametrize('spec', [PRIME_FIELD_32, PRIME_FIELD_64])
def test_inverse(rng, spec):
    for _ in range(1000):
        x = int(rng.integers(1, spec.p))
        assert pf_mul(x, pf_inv(x, spec), spec) == 1
    with pytest.raises(ZeroDivisionError):
        pf_inv(0, spec)


################################################################################
# PRIMES
################################################################################

@pytest.mark.parametrize('n, expected', [
    (0, False),
    (1, False),
    (2, True),
    (9, False),
    (37, True),
    (561, False),
    (P32, True),
    (P64, True),
    ((1 << 61) - 1, True),
    (18446744073709551557, True),
    ((1 << 62) + 1, False),
])
def test_is_prime(n, expected):
    assert is_prime(n) is expected


def test_is_prime_limit():
    with pytest.raises(ValueError):
        is_prime(1 << 64)


def test_builtin_specs_verify():
    assert verify_spec(PRIME_FIELD_32)
    assert verify_spec(PRIME_FIELD_64)
    assert FIELD_SPECS[32] is PRIME_FIELD_32
    assert PRIME_FIELD_32.half_bits == 16
    assert PRIME_FIELD_64.double_bits == 128
    assert PRIME_FIELD_64.name == 'PrimeField64'


def test_bad_specs_fail_verification():
    # 1 has order 1, 2**30 - 1 is not prime, and 2**31 + 1 is divisible by 3
    assert not verify_spec(PRIME_FIELD_32._replace(g=1))
    assert not verify_spec(FieldSpec(p=(1 << 30) - 1, k=1, n=30, g=3,
                                     full_bits=32))
    assert not verify_spec(FieldSpec(p=(1 << 31) + 1, k=1, n=31, g=3,
                                     full_bits=32))
    assert not verify_spec(PRIME_FIELD_64._replace(full_bits=32))


def test_find_32_bit_prime():
    spec = find_ntt_prime(30, 32)
    assert (spec.p, spec.k, spec.n) == (P32, 3, 30)
    assert verify_spec(spec)


def test_find_64_bit_prime():
    spec = find_ntt_prime(57, 64)
    assert spec.n >= 57
    assert spec.p < 1 << 64
    assert verify_spec(spec)


def test_find_small_prime():
    spec = find_ntt_prime(4, 32)
    assert spec.n >= 4
    assert verify_spec(spec)


def test_find_prime_errors():
    with pytest.raises(LookupError):
        find_ntt_prime(40, 32)
    with pytest.raises(ValueError):
        find_ntt_prime(10, 16)
    with pytest.raises(ValueError):
        find_ntt_prime(0, 32)


################################################################################
# ROOTS OF UNITY
################################################################################

@pytest.mark.parametrize('spec', [PRIME_FIELD_32, PRIME_FIELD_64])
@pytest.mark.parametrize('m', [1, 2, 8, 1024])
def test_omega_table(spec, m):
    tbl = omega_table(spec, m)
    assert len(tbl.omegas) == len(tbl.omegas_inv) == m
    assert tbl.omegas[0] == tbl.omegas_inv[0] == 1
    omega = tbl.omegas[1] if m > 1 else 1
    assert pf_pow(omega, m, spec) == 1
    if m > 1:
        assert pf_pow(omega, m // 2, spec) == spec.p - 1
    for w, w_inv in zip(tbl.omegas, tbl.omegas_inv):
        assert pf_mul(w, w_inv, spec) == 1
    assert pf_mul(tbl.inv_m, m, spec) == 1


def test_omega_orthogonality():
    spec, m = PRIME_FIELD_32, 16
    tbl = omega_table(spec, m)
    for i in range(m):
        total = 0
        for j in range(m):
            total = pf_add(total, tbl.omegas[(i * j) % m], spec)
        assert total == (m if i == 0 else 0)


def test_omega_table_errors():
    with pytest.raises(ValueError):
        omega_table(PRIME_FIELD_32, 12)
    with pytest.raises(ValueError):
        omega_table(PRIME_FIELD_32, 1 << 31)


################################################################################
# FIXTURES
################################################################################

def test_field_specs_round_trip_through_json(tmp_path):
    path = str(tmp_path / 'fields.json')
    dump_field_specs([PRIME_FIELD_32, PRIME_FIELD_64], path)
    assert load_field_specs(path) == [PRIME_FIELD_32, PRIME_FIELD_64]
