# activate the petl extensions
import midint.bench.workload
