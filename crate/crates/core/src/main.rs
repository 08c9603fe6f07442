fn main() {
    std::process::exit(dpcalc::cli::main());
}
