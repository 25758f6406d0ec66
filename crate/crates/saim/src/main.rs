fn main() {
    std::process::exit(saim::cli::run());
}
