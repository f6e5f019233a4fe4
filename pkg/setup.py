#!/usr/bin/env python3
"""
Setup script for Viewport Stream
"""

from setuptools import setup, find_packages
import os

# Get the directory containing this file
here = os.path.abspath(os.path.dirname(__file__))

def read_file(filename):
    """Read file contents."""
    with open(os.path.join(here, filename), "r", encoding="utf-8") as fh:
        return fh.read()

def read_requirements(filename):
    """Read requirements from file."""
    requirements = []
    with open(os.path.join(here, filename), "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                requirements.append(line)
    return requirements

# Read files
long_description = read_file("README.md")
requirements = read_requirements("requirements.txt")

setup(
    name="viewport-stream",
    version="1.0.0",
    author="Viewport Stream Team",
    description="Object-aware viewport prediction and tile bitrate allocation for 360 degree video streaming",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    py_modules=["main"],
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: Multimedia :: Video",
        "Topic :: Scientific/Engineering",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Environment :: Console",
    ],
    python_requires=">=3.8",
    install_requires=requirements,
    entry_points={
        "console_scripts": [
            "viewport-stream=main:cli",
            "parima-stream=main:cli",
        ],
    },
    include_package_data=True,
    zip_safe=False,
    keywords="360 video viewport prediction arima passive-aggressive tiles bitrate qoe",
    platforms=["any"],
)
