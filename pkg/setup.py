# -*- coding: utf-8 -*-
from setuptools import setup, find_packages

setup(
    name='nonlocal-crossdiff',
    version='0.3.1',
    packages=find_packages(),
    include_package_data=True,
    license='AGPL',
    description='Entropy-stable finite volume scheme for nonlocal' + \
                ' cross-diffusion systems on the one-dimensional torus,' + \
                ' with convergence, localization and segregation studies.',
    long_description=open('README.rst', encoding='utf-8').read(),
    zip_safe=False,
    python_requires='>=3.8',
    install_requires = [
      'Django>=3.2,<5.0',
      'djangorestframework>=3.12.0,<4.0.0',
      'djangorestframework-csv>=2.1.0,<4.0.0',
      'numpy>=1.21.0,<3.0.0',
      'scipy>=1.7.0,<2.0.0',
      'coverage>=5.5,<8.0.0',
      'hypothesis>=6.50.0,<7.0.0',
    ],
    entry_points = {
      'console_scripts': [
        'crossdiff=nonlocal_crossdiff.__main__:main',
      ],
    },
)
