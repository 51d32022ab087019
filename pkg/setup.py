import setuptools

setuptools.setup(
	name='chdarcy',
	version='0.3.0',
	packages=[
		'chdarcy',
		'chdarcy.analysis',
		'chdarcy.discrete',
		'chdarcy.evolution',
		'chdarcy.harness',
		'chdarcy.physics',
		'chdarcy.support',
	],
	install_requires=[
		'numpy>=1.24',
		'scipy>=1.12',
	],
	entry_points={'console_scripts': ['chdarcy = chdarcy.__main__:run_cli']},
	description='Cahn-Hilliard-Darcy flow with a mass source: solver, diagnostics and verification studies',
	long_description=open('README.md').read(),
	long_description_content_type="text/markdown",
	classifiers=[
		"Programming Language :: Python :: 3.9",
		"License :: OSI Approved :: MIT License",
		"Operating System :: OS Independent",
		"Topic :: Scientific/Engineering :: Physics",
		"Development Status :: 3 - Alpha",
	],
)
