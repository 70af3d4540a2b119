from setuptools import setup, find_packages
from pathlib import Path

# 讀取README檔案
this_directory = Path(__file__).parent
long_description = (this_directory / "README.md").read_text(encoding="utf-8")

# 取得主要版本號
version = "1.0.0"

# 程式相依套件
requirements = [
    "numpy>=1.23.0",
    "scipy>=1.9.0",     # 特殊函數、QUADPACK 積分、FFT、內插
    "pandas>=1.5.0",    # CSV 輸入輸出
    "pyyaml>=6.0",      # 配置檔
    "jinja2>=3.1.0",    # 繪圖腳本樣板
    "mpmath>=1.3.0",    # 延伸精度神諭
]

# 開發用套件
dev_requirements = [
    "pytest>=7.2.0",
    "pytest-cov>=4.0.0",
    "black>=22.10.0",     # 程式碼格式化
    "flake8>=5.0.4",      # 程式碼檢查
    "mypy>=0.991",        # 型別檢查
]

setup(
    name="thermal-toolkit",
    version=version,
    author="Thermal Toolkit Team",
    description="一維熱哈密頓數值工具箱",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "examples", "examples.*"]),

    # 程式進入點
    entry_points={
        "console_scripts": [
            "thermal-toolkit=src.main:main",
        ],
    },

    # 安裝資料檔案
    package_data={
        "src.thermal": [
            "config/*.yaml",
            "resources/templates/*.j2",
        ],
    },

    # 相依套件
    install_requires=requirements,

    # 開發用套件
    extras_require={
        "dev": dev_requirements,
    },

    # 分類資訊
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Physics",
        "Topic :: Scientific/Engineering :: Mathematics",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Operating System :: OS Independent",
        "Natural Language :: Chinese (Traditional)",
        "Environment :: Console",
    ],

    # 專案資訊
    keywords="hamiltonian, propagator, resolvent, scattering, bessel, kelvin",
    python_requires=">=3.9",
    zip_safe=False,  # 需要讀取樣板與配置檔
)

# 指令範例
"""
# 開發環境安裝
pip install -e .[dev]

# 執行測試
python -m pytest --cov=src

# 自我測試
thermal-toolkit --out results selftest

# 古典軌跡
thermal-toolkit --out results classical --preset 1d
"""

# 相關檔案結構
"""
thermal-toolkit/
├── src/
│   ├── thermal/
│   │   ├── config/
│   │   ├── resources/templates/
│   │   ├── specfun.py ... hankel.py
│   │   ├── experiments.py
│   │   └── acceptance.py
│   ├── utils/
│   └── main.py
├── tests/
├── README.md
├── DESIGN.md
├── requirements.txt
└── setup.py
"""
