import pytest

from midint.base import BigUint, DigitVector, BlockConfig
from midint.block import check_schedule_independence
from midint.classical import bmul_classical
from midint.ntt import FieldVector, field_vector, bit_reverse_permute, \
    ntt_forward, ntt_inverse, max_safe_digit_width, split_digits, bmul_ntt, \
    check_digit_width, ntt_digit_preset, ntt_max_bits, bmul_ntt_words, \
    ntt_forward_kernel, bmul_ntt_kernel, run_ntt_forward_block, \
    run_bmul_ntt_block, run_bmul_ntt_words_block
from midint.oracle import oracle_mul, oracle_mul_base
from midint.prime_field import FieldSpec, PRIME_FIELD_32, PRIME_FIELD_64, \
    omega_table, pf_add, pf_mul


SPECS = [PRIME_FIELD_32, PRIME_FIELD_64]


def _random_vector(rng, spec, m):
    return field_vector([int(x) for x in rng.integers(0, spec.p, size=m)],
                        spec)


def _random_digits(rng, m, digit_bits):
    return DigitVector(rng.integers(0, 1 << digit_bits, size=m), digit_bits)


################################################################################
# TRANSFORMS
################################################################################

def test_bit_reverse_permute():
    assert bit_reverse_permute(list(range(8)), 3) == [0, 4, 2, 6, 1, 5, 3, 7]
    assert bit_reverse_permute([9], 0) == [9]
    with pytest.raises(ValueError):
        bit_reverse_permute([1, 2, 3], 2)


def test_field_vector_range():
    with pytest.raises(ValueError):
        field_vector([PRIME_FIELD_32.p], PRIME_FIELD_32)
    with pytest.raises(ValueError):
        field_vector([-1], PRIME_FIELD_32)


@pytest.mark.parametrize('spec', SPECS)
def test_forward_of_delta_and_zero(spec):
    tbl = omega_table(spec, 16)
    delta = field_vector([1] + [0] * 15, spec)
    assert ntt_forward(delta, tbl).elems == (1,) * 16
    zero = field_vector([0] * 16, spec)
    assert ntt_forward(zero, tbl) == zero


@pytest.mark.parametrize('spec', SPECS)
@pytest.mark.parametrize('m', [1, 2, 4, 16, 64])
def test_forward_matches_direct_sum(rng, spec, m):
    tbl = omega_table(spec, m)
    v = _random_vector(rng, spec, m)
    expected = []
    for j in range(m):
        total = 0
        for i, x in enumerate(v.elems):
            total = pf_add(total, pf_mul(x, tbl.omegas[(i * j) % m], spec),
                           spec)
        expected.append(total)
    assert list(ntt_forward(v, tbl).elems) == expected


@pytest.mark.parametrize('spec', SPECS)
@pytest.mark.parametrize('m', [2, 8, 256])
def test_inverse_undoes_forward(rng, spec, m):
    tbl = omega_table(spec, m)
    for _ in range(10):
        v = _random_vector(rng, spec, m)
        assert ntt_inverse(ntt_forward(v, tbl), tbl) == v
        assert ntt_forward(ntt_inverse(v, tbl), tbl) == v


@pytest.mark.parametrize('spec', SPECS)
def test_pointwise_product_is_cyclic_convolution(rng, spec):
    m = 16
    tbl = omega_table(spec, m)
    a, b = _random_vector(rng, spec, m), _random_vector(rng, spec, m)
    fa, fb = ntt_forward(a, tbl), ntt_forward(b, tbl)
    prod = FieldVector(tuple(pf_mul(x, y, spec)
                             for x, y in zip(fa.elems, fb.elems)), spec)
    expected = [0] * m
    for i in range(m):
        for j in range(m):
            expected[(i + j) % m] = pf_add(
                expected[(i + j) % m], pf_mul(a.elems[i], b.elems[j], spec),
                spec)
    assert list(ntt_inverse(prod, tbl).elems) == expected


def test_table_length_must_match():
    tbl = omega_table(PRIME_FIELD_32, 8)
    with pytest.raises(ValueError):
        ntt_forward(field_vector([0] * 4, PRIME_FIELD_32), tbl)


################################################################################
# DIGITS
################################################################################

@pytest.mark.parametrize('spec, conv_len, expected', [
    (PRIME_FIELD_32, 2, 15),
    (PRIME_FIELD_32, 8, 14),
    (PRIME_FIELD_64, 1 << 17, 22),
])
def test_max_safe_digit_width(spec, conv_len, expected):
    d = max_safe_digit_width(spec, conv_len)
    assert d == expected
    assert conv_len * ((1 << d) - 1) ** 2 < spec.p
    assert conv_len * ((1 << (d + 1)) - 1) ** 2 >= spec.p


def test_max_safe_digit_width_errors():
    with pytest.raises(ValueError):
        max_safe_digit_width(PRIME_FIELD_32, 0)
    with pytest.raises(ValueError):
        max_safe_digit_width(FieldSpec(17, 1, 4, 3, 32), 32)


@pytest.mark.parametrize('vals, lows, high, carry', [
    ([0x1F, 0x3], [0xF, 0x4], 0, 0),
    ([0xFFF, 0], [0xF, 0xF], 0xF, 0),
    ([0xFFFF, 0], [0xF, 0xF], 0xF, 0xF),
])
def test_split_digits(vals, lows, high, carry):
    assert split_digits(vals, 4) == (lows, high, carry)


def test_split_digits_overflow():
    with pytest.raises(ValueError):
        split_digits([1 << 20, 0], 4)


################################################################################
# MULTIPLICATION
################################################################################

def test_small_digit_product():
    a, b = DigitVector([2, 3], 4), DigitVector([4, 5], 4)
    assert bmul_ntt(a, b).digits.tolist() == [8, 6]


@pytest.mark.parametrize('spec, m_d, digit_bits, q', [
    (PRIME_FIELD_32, 4, 14, 2),
    (PRIME_FIELD_32, 16, 12, 2),
    (PRIME_FIELD_32, 16, 12, 4),
    (PRIME_FIELD_64, 8, 22, 2),
    (PRIME_FIELD_64, 64, 22, 4),
])
def test_bmul_ntt_matches_oracle(rng, spec, m_d, digit_bits, q):
    for _ in range(5):
        a = _random_digits(rng, m_d, digit_bits)
        b = _random_digits(rng, m_d, digit_bits)
        assert bmul_ntt(a, b, spec, q) == oracle_mul_base(a, b)
    top = DigitVector([(1 << digit_bits) - 1] * m_d, digit_bits)
    assert bmul_ntt(top, top, spec, q) == oracle_mul_base(top, top)


def test_safe_bound_is_sharp():
    safe = max_safe_digit_width(PRIME_FIELD_32, 8)

    def square(d):
        top = DigitVector([(1 << d) - 1] * 4, d)
        return bmul_ntt(top, top, PRIME_FIELD_32, check_bound=False), \
            oracle_mul_base(top, top)

    got, expected = square(safe)
    assert got == expected
    got, expected = square(safe + 1)
    assert got != expected


def test_unsafe_digit_width_is_rejected():
    a = DigitVector([1] * 4, 15)
    with pytest.raises(ValueError):
        bmul_ntt(a, a, PRIME_FIELD_32)


def test_transform_too_long_for_the_field():
    tiny = FieldSpec(17, 1, 4, 3, 32)
    a = DigitVector([1] * 16, 1)
    with pytest.raises(ValueError):
        bmul_ntt(a, a, tiny, check_bound=False)


def test_bmul_ntt_argument_errors():
    with pytest.raises(ValueError):
        bmul_ntt(DigitVector([1, 2], 4), DigitVector([1, 2, 3, 4], 4))
    with pytest.raises(ValueError):
        bmul_ntt(DigitVector([1, 2], 4), DigitVector([1, 2], 4), q=1)


@pytest.mark.parametrize('spec', SPECS)
@pytest.mark.parametrize('m, width_bits', [(4, 64), (8, 32), (16, 16)])
def test_bmul_ntt_words_matches_classical(random_biguint, spec, m,
                                          width_bits):
    for _ in range(5):
        a, b = random_biguint(m, width_bits), random_biguint(m, width_bits)
        expected = oracle_mul(a, b)
        assert bmul_ntt_words(a, b, spec) == expected
        assert bmul_classical(a, b, q=2) == expected
    ones = BigUint.ones(m, width_bits)
    assert bmul_ntt_words(ones, ones, spec) == oracle_mul(ones, ones)


def test_bmul_ntt_words_with_explicit_digits(random_biguint):
    a, b = random_biguint(8, 32), random_biguint(8, 32)
    assert bmul_ntt_words(a, b, PRIME_FIELD_64, digit_bits=16) == \
        oracle_mul(a, b)
    with pytest.raises(ValueError):
        bmul_ntt_words(a, b, PRIME_FIELD_32, digit_bits=16)


def test_digit_preset():
    assert ntt_digit_preset(PRIME_FIELD_64, 1 << 18) == 23
    with pytest.raises(ValueError):
        check_digit_width(PRIME_FIELD_64, 1 << 18, 24)


@pytest.mark.parametrize('spec, num_bits', [
    (PRIME_FIELD_32, 64),
    (PRIME_FIELD_32, 1024),
    (PRIME_FIELD_32, 8192),
    (PRIME_FIELD_64, 64),
    (PRIME_FIELD_64, 1 << 14),
    (PRIME_FIELD_64, 1 << 18),
])
def test_digit_preset_is_the_widest_safe_digit(spec, num_bits):
    d = ntt_digit_preset(spec, num_bits)
    check_digit_width(spec, num_bits, d)
    if d < spec.half_bits:
        with pytest.raises(ValueError):
            check_digit_width(spec, num_bits, d + 1)


@pytest.mark.parametrize('q', [2, 4, 8])
def test_prime_field_32_tops_out_at_8192_bits(q):
    assert ntt_max_bits(PRIME_FIELD_32, q) == 8192
    for num_bits in [1 << 14, 1 << 18]:
        with pytest.raises(ValueError, match='at most 8192 bits'):
            ntt_digit_preset(PRIME_FIELD_32, num_bits, q)


def test_prime_field_64_reaches_the_largest_sizes():
    assert ntt_max_bits(PRIME_FIELD_64) >= 1 << 18


################################################################################
# BLOCK KERNELS
################################################################################

@pytest.mark.parametrize('spec', SPECS)
@pytest.mark.parametrize('q', [2, 4])
def test_block_forward_matches_reference(rng, spec, q):
    tbl = omega_table(spec, 16)
    v = _random_vector(rng, spec, 16)
    assert run_ntt_forward_block(v, tbl, q=q, validate=True) == \
        ntt_forward(v, tbl)


def test_block_forward_keeps_the_transform_length():
    tbl = omega_table(PRIME_FIELD_64, 8)
    v = field_vector([1, 2, 3, 4, 5, 6, 7, 8], PRIME_FIELD_64)
    out = run_ntt_forward_block(v, tbl, q=2)
    assert len(out.elems) == 8
    assert out.elems[0] == 36
    assert out == ntt_forward(v, tbl)


def test_forward_kernel_phase_count():
    kernel = ntt_forward_kernel(BlockConfig(64, q=2, kind='fft'),
                                PRIME_FIELD_32)
    assert len(kernel.phases) == 2 + 6
    assert kernel.thread_count == 32


@pytest.mark.parametrize('spec, digit_bits', [(PRIME_FIELD_32, 12),
                                              (PRIME_FIELD_64, 22)])
@pytest.mark.parametrize('q', [2, 4])
def test_block_multiply_matches_reference(rng, spec, digit_bits, q):
    a = _random_digits(rng, 8, digit_bits)
    b = _random_digits(rng, 8, digit_bits)
    assert run_bmul_ntt_block(a, b, spec, q, validate=True) == \
        bmul_ntt(a, b, spec, q)


def test_block_word_multiply(random_biguint):
    a, b = random_biguint(4, 32), random_biguint(4, 32)
    assert run_bmul_ntt_words_block(a, b, PRIME_FIELD_64) == oracle_mul(a, b)


def test_ntt_kernels_are_schedule_independent(rng):
    spec = PRIME_FIELD_32
    x = [int(v) for v in rng.integers(0, spec.p, size=16)]
    assert check_schedule_independence(
        ntt_forward_kernel(BlockConfig(16, q=2, kind='fft'), spec), {'X': x})

    digits = rng.integers(0, 1 << 12, size=8).tolist()
    inputs = {'A': digits + [0] * 8, 'B': digits[::-1] + [0] * 8}
    assert check_schedule_independence(
        bmul_ntt_kernel(BlockConfig(16, q=2, kind='fft'), spec, 12), inputs)


def test_kernel_needs_a_single_fft_instance():
    with pytest.raises(ValueError):
        ntt_forward_kernel(BlockConfig(16, q=2), PRIME_FIELD_32)
    with pytest.raises(ValueError):
        ntt_forward_kernel(BlockConfig(16, q=2, ipb=2, kind='fft'),
                           PRIME_FIELD_32)


@pytest.mark.parametrize('m', [64, 1024])
def test_forward_kernel_is_schedule_independent(rng, m):
    spec = PRIME_FIELD_64
    x = [int(v) for v in rng.integers(0, spec.p, size=m)]
    assert check_schedule_independence(
        ntt_forward_kernel(BlockConfig(m, q=2, kind='fft'), spec), {'X': x})


def test_multiply_kernel_is_schedule_independent_at_64_points(rng):
    digits = rng.integers(0, 1 << 22, size=32).tolist()
    inputs = {'A': digits + [0] * 32, 'B': [(1 << 22) - 1] * 32 + [0] * 32}
    kernel = bmul_ntt_kernel(BlockConfig(64, q=4, kind='fft'), PRIME_FIELD_64,
                             22)
    assert check_schedule_independence(kernel, inputs)


################################################################################
# FULL SIZE
################################################################################

@pytest.mark.slow
@pytest.mark.parametrize('spec', SPECS)
def test_inverse_undoes_forward_at_full_size(rng, spec):
    m = 1 << 14
    tbl = omega_table(spec, m)
    v = _random_vector(rng, spec, m)
    assert ntt_inverse(ntt_forward(v, tbl), tbl) == v


@pytest.mark.slow
@pytest.mark.parametrize('num_bits', [1 << 16, 1 << 17, 1 << 18])
def test_bmul_ntt_words_at_full_size(random_biguint, num_bits):
    m = num_bits // 64
    a, b = random_biguint(m, 64), random_biguint(m, 64)
    assert bmul_ntt_words(a, b, PRIME_FIELD_64) == oracle_mul(a, b)


@pytest.mark.slow
def test_bmul_ntt_words_all_max_at_full_size():
    ones = BigUint.ones(4096, 64)
    assert bmul_ntt_words(ones, ones, PRIME_FIELD_64) == oracle_mul(ones, ones)


@pytest.mark.slow
def test_multiply_kernel_is_schedule_independent_at_1024_points(rng):
    digits = rng.integers(0, 1 << 22, size=512).tolist()
    inputs = {'A': digits + [0] * 512, 'B': [(1 << 22) - 1] * 512 + [0] * 512}
    kernel = bmul_ntt_kernel(BlockConfig(1024, q=4, kind='fft'),
                             PRIME_FIELD_64, 22)
    assert check_schedule_independence(kernel, inputs)
