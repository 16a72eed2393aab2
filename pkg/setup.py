from setuptools import setup, find_packages

setup(
    name='duality-defect-verifier',
    version='0.1.0',
    author='Your Name',
    author_email='your.email@example.com',
    description='Exhaustive, certificate-producing verifier for the duality defect conjecture in codimension m >= 3.',
    packages=find_packages(where='src') + ['config'],
    package_dir={'': 'src', 'config': 'config'},
    py_modules=[
        'casegen',
        'certificate',
        'codim3',
        'main',
        'parallel_processor',
        'recurrence',
        'search',
    ],
    python_requires='>=3.9',
    install_requires=[
        'gmpy2>=2.1',
        'python-dotenv>=0.17.1',
        'sympy>=1.7',
    ],
    extras_require={
        'test': [
            'hypothesis>=6.0',
            'pytest>=6.2.4',
            'pytest-cov>=2.12.1',
        ],
    },
    entry_points={
        'console_scripts': [
            'defect-verifier=main:main',
        ],
    },
)
