from pathlib import Path
from setuptools import setup

README = (Path(__file__).parent / "README.md").read_text(encoding="utf-8")

setup(
    name='peekac',
    version='0.1.0',
    description='Arc consistency and peek arc consistency for finite and infinite-template CSPs.',
    long_description=README,
    long_description_content_type='text/markdown',
    license='MIT',
    python_requires='>=3.8',
    py_modules=[
        'peekac',
        'peekac_config',
        'peekac_utils',
        'peekac_models',
        'peekac_structures',
        'peekac_homs',
        'peekac_pp',
        'peekac_io',
        'peekac_ac',
        'peekac_pac',
        'peekac_setcon',
        'peekac_templates',
        'peekac_meta',
        'peekac_commands',
    ],
    entry_points={
        'console_scripts': [
            'peekac=peekac:main',
        ],
    },
    install_requires=['networkx>=2.6'],
    extras_require={
        'test': ['pytest', 'hypothesis'],
    },
    classifiers=[
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3 :: Only',
        'License :: OSI Approved :: MIT License',
        'Operating System :: OS Independent',
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
)
