import os
from setuptools import setup


# Version information
def get_version_number():
    with open(os.path.join('riscfmimo', 'VERSION'), 'r') as f:
        for line in f:
            return line.strip().split('.')

    return ()

# Alpha build information
# Builder must create a file in the project root directory called "ALPHA"
# with the alpha build string in it if they want the build to have a version
# with extra information appended to it.
def get_alpha_str():
    if os.path.exists('ALPHA'):
        with open('ALPHA', 'r') as f:
            for line in f:
                return line.strip()

    return None

version_tuple = get_version_number()

if len(version_tuple) < 3:
    raise SystemError("Couldn't find the module version number!")

version = '{}.{}.{}'.format(version_tuple[0], version_tuple[1], version_tuple[2])
alpha_str = get_alpha_str()

if alpha_str is not None:
    version += alpha_str

with open("README.rst", "r") as fh:
    long_description = fh.read()


setup(name='riscfmimo',
      version=version,
      description='Closed-form and Monte-Carlo rates of RIS-aided cell-free massive MIMO downlinks.',
      long_description=long_description,
      python_requires='>=3.8',

      classifiers=[
          'Operating System :: Microsoft :: Windows',
          'Operating System :: POSIX',
          'Operating System :: MacOS :: MacOS X',
          'Programming Language :: Python :: 3',
          'Topic :: Scientific/Engineering'],

      keywords='cell-free, massive mimo, ris, reconfigurable intelligent surface, monte-carlo, wireless',
      license='GPL-2.0 License',

      packages=['riscfmimo'],
      package_data={'riscfmimo': ['VERSION']},
      install_requires=['numpy>=1.22', 'scipy>=1.9'],
      entry_points={'console_scripts': ['riscfmimo=riscfmimo.cli:main']})
