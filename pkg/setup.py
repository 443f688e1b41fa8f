from setuptools import setup, find_packages

setup(name='midint',
      version='0.1.0',
      description='Midsize big-integer kernels on a phase-parallel block model',
      packages=find_packages(exclude=['tests']),
      install_requires=['petl>=1.7', 'numpy>=1.20'],
      extras_require={'test': ['pytest']},
      entry_points={'console_scripts': ['midint = midint.cli:main']})
