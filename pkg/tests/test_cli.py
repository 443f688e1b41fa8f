import petl as etl
import pytest

from midint.cli import main, build_parser, EXIT_OK, EXIT_INCORRECT, \
    EXIT_INVALID


@pytest.fixture
def output(tmp_path):
    def make(name):
        return str(tmp_path / name)
    return make


def test_bench_urls_to_csv(output):
    path = output('bench.csv')
    code = main(['bench', 'add1://1024/8', 'mul-classic://256/4?q=2',
                 '--runs', '1', '--format', 'csv', '--output', path])
    assert code == EXIT_OK
    table = etl.fromcsv(path)
    assert etl.values(table, 'op').list() == ['add1', 'mul-classic']
    assert etl.values(table, 'correct').list() == ['True', 'True']


def test_bench_flags_to_json(output):
    path = output('bench.json')
    code = main(['bench', '--op', 'mul-ntt', '--bits', '512', '--insts', '2',
                 '--runs', '1', '--engine', 'block', '--format', 'json',
                 '--output', path])
    assert code == EXIT_OK
    rows = list(etl.dicts(etl.fromjson(path)))
    assert rows[0]['op'] == 'mul-ntt'
    assert rows[0]['correct'] is True


def test_bench_text_table(output):
    path = output('bench.txt')
    assert main(['bench', 'add6://512/2?runs=1', '--output', path]) == EXIT_OK
    with open(path) as f:
        assert 'add6' in f.read()


@pytest.mark.parametrize('argv', [
    ['bench'],
    ['bench', 'add3://1024/8'],
    ['bench', '--op', 'add1', '--bits', '1000', '--insts', '8'],
    ['bench', '--op', 'mul-ntt', '--bits', '1024', '--insts', '8',
     '--digit-bits', '40'],
    ['bench', 'add1://1024/8', '--budget', '100'],
])
def test_bench_rejects_bad_workloads(argv):
    assert main(argv) == EXIT_INVALID


def test_find_prime(output):
    path = output('prime.json')
    code = main(['find-prime', '--bits', '32', '--min-n', '30', '--format',
                 'json', '--output', path])
    assert code == EXIT_OK
    row = list(etl.dicts(etl.fromjson(path)))[0]
    assert (row['p'], row['k'], row['n']) == (3221225473, 3, 30)


def test_find_prime_without_a_result():
    assert main(['find-prime', '--bits', '32', '--min-n', '40']) == \
        EXIT_INCORRECT


def test_verify(output):
    path = output('verify.csv')
    code = main(['verify', '--count', '2', '--format', 'csv', '--output',
                 path])
    assert code == EXIT_OK
    table = etl.fromcsv(path)
    assert etl.nrows(table) > 5
    assert set(etl.values(table, 'passed')) == {'True'}
    kernels = etl.lookupone(table, 'check', 'cases')
    assert kernels['kernels_schedule_independent'] == '8'


def test_parser_needs_a_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])
