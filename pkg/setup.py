"""Setup script"""

from setuptools import setup

def readme():
    """Returns the contents of README.rst"""

    with open('README.rst') as readme_file:
        return readme_file.read()

setup(name='qhgeo',
    version='0.3.0',
    description='Quasihyperbolic metric, uniformity and Gromov hyperbolicity '
                'experiments on discretized planar domains.',
    long_description=readme(),
    classifiers=[
        'Development Status :: 4 - Beta',
        'License :: OSI Approved :: MIT License',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
    keywords='quasihyperbolic metric uniform domain john domain gromov hyperbolic '
             'quasisymmetry inner metric',
    license='MIT',
    packages=['qhgeo', 'qhgeo.domains', 'qhgeo.event'],
    python_requires='>=3.6',
    install_requires=[
        'numpy>=1.17',
        'scipy>=1.4',
    ],
    test_suite='nose.collector',
    tests_require=['nose', 'mock'],
    scripts=['bin/qhgeo'],
    entry_points={
        'console_scripts': ['qhgeo-run = qhgeo.cli:main'],
    },
    include_package_data=True,
    zip_safe=False)
