from setuptools import setup, find_packages

setup(
    name="waveletls",
    version="0.1.0",
    packages=find_packages(include=["waveletls", "waveletls.*"]),
    include_package_data=True,
    package_data={"waveletls": ["config/*.yaml"]},
    install_requires=[
        "typer>=0.9.0",
        "pydantic>=2.0.0",
        "rich>=13.3.5",
        "pyyaml>=6.0",
        "numpy>=1.24.3",
        "pandas>=2.0.1",
        "scipy>=1.10.0",
        "PyWavelets>=1.4.1",
    ],
    entry_points={
        'console_scripts': [
            'waveletls=waveletls.cli.commands:app',
        ],
    },
    python_requires=">=3.10",
    description="Wavelet least-squares estimation of additive regression models on random designs",
    keywords="wavelets, additive models, nonparametric regression, least squares, simulation",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Programming Language :: Python :: 3.10",
    ],
)
