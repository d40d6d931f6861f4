fn main() {
    std::process::exit(pathperc::cli::main());
}
