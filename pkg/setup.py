from setuptools import setup, find_packages

setup(
    name="debranges-spectral-lab",
    version="1.0.0",
    description="Numerical laboratory for de Branges spaces, spectral measures and uniqueness "
                "of one-dimensional Schrodinger operators",
    author="DBLAB Team",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    py_modules=["main"],
    install_requires=[
        "numpy>=2.0",
        "scipy>=1.13",
        "pandas>=2.2",
        "pydantic>=2.7",
        "PyYAML>=6.0",
        "tqdm>=4.66",
    ],
    extras_require={
        "dev": [
            "pytest>=8.0.0",
            "black>=24.0",
            "flake8>=7.0.0",
        ],
    },
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    python_requires=">=3.10",
    entry_points={
        "console_scripts": [
            "dblab=main:main",
        ],
    },
)
