fn main() {
    std::process::exit(iacscan::cli::run_main());
}
