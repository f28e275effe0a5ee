#!/usr/bin/env python3

"""The setup script."""

from setuptools import setup, find_packages

with open('README.rst') as readme_file:
    readme = readme_file.read()

requirements = [
    'django>=3',
    'djangorestframework>=3',
    'ruamel.yaml>=0.17',
    'numpy>=1.20',
    'scipy>=1.5',
    'scikit-learn>=1.0',
    'pandas>=1.5',
    'typing_extensions',
]

test_requirements = ['pytest>=3', 'typing_extensions']

setup(
    python_requires='>=3.8',
    classifiers=[
        'Development Status :: 2 - Pre-Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Natural Language :: English',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Topic :: Scientific/Engineering :: Information Analysis',
    ],
    description="Community detection on networks with node features",
    install_requires=requirements,
    license="MIT",
    long_description=readme,
    long_description_content_type='text/x-rst',
    include_package_data=True,
    keywords=['network', 'community detection', 'node features', 'stochastic block model'],
    name='tether-communities',
    packages=find_packages(include=['tether', 'tether.*']),
    entry_points={
        'console_scripts': ['tether=tether.cli:main'],
    },
    test_suite='tests',
    tests_require=test_requirements,
    version='0.1.0',
    zip_safe=False,
)
