import codecs
import os

from setuptools import find_packages, setup

import sandwich

here = os.path.abspath(os.path.dirname(__file__))


def read(*parts):
    # intentionally *not* adding an encoding option to open, See:
    #   https://github.com/pypa/virtualenv/issues/201#issuecomment-3145690
    return codecs.open(os.path.join(here, *parts), 'r').read()


setup(
    name='sandwich',
    version=sandwich.__version__,
    description='Sandwiched quantum Renyi divergences, conditional entropies and their property suites.',
    long_description=(read('README.rst') + '\n\n' + read('RELEASE_NOTES.rst')),
    license='GPLv2',
    packages=find_packages(exclude=['tests']),
    entry_points={
        "console_scripts": [
            "sw=sandwich.sw:main"
        ]
    },
    classifiers=[
        'Development Status :: 4 - Beta',
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'Natural Language :: English',
        'License :: OSI Approved :: GNU General Public License v2 (GPLv2)',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.7',
        'Programming Language :: Python :: 3.8',
        'Topic :: Scientific/Engineering :: Physics',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
    python_requires='>=3.7',
    install_requires=[
        "appdirs",
        "humanize",
        "psutil",
        "numpy",
        "scipy"],
    extras_require={
        'test': ["pytest"]
    }
)
